// Copyright 2026 the lidarprep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LIDARPREP_CLI_HPP_
#define LIDARPREP_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace lidarprep {

// Runs one pipeline command (project, fuse, voxelize, augment, stats, nms).
// args excludes the program name. Returns the process exit status; usage and
// runtime errors print a single diagnostic line to err and return nonzero.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lidarprep

#endif  // LIDARPREP_CLI_HPP_
