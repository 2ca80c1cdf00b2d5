// SPDX-License-Identifier: Apache-2.0

#ifndef HARDENING_VERSION_HPP
#define HARDENING_VERSION_HPP

namespace hardening {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hardening

#endif  // HARDENING_VERSION_HPP
