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

#pragma once

namespace lidarprep::par {

// Thread count used by every OpenMP kernel in the library. Resolution order:
// set_thread_count() > LIDARPREP_THREADS env var > OpenMP default. All kernels
// produce bit-identical results for any thread count.
int thread_count();

void set_thread_count(int n);  // n >= 1

}  // namespace lidarprep::par
