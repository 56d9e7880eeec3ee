// Copyright 2026 The Gauntlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace gauntlet::cli {

// Entry point behind the `gauntlet` binary, separated so tests can drive it
// with argv arrays. Exit codes: 0 success, 1 evaluation error, 2 config or
// format error (including unparseable command lines).
int run_cli(int argc, const char* const* argv);

}  // namespace gauntlet::cli
