// Copyright (c) the msfem2d1d authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace msfem {

inline constexpr const char* version_string = "0.1.0";

} // namespace msfem
