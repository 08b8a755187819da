// SPDX-License-Identifier: Apache-2.0
//
// hucya: wideband channel-parameter estimation for hybrid cylindrical arrays
// Copyright (C) 2026 The hucya authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HUCYA_SELFTEST_HPP
#define HUCYA_SELFTEST_HPP

// Fast invariant checks runnable from the command line on any machine

#include <string>
#include <vector>

namespace hucya
{
    struct SelfTestResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    std::vector<SelfTestResult> run_selftest();
}

#endif
