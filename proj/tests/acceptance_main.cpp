/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Runs the full validation suite at its stated tolerances and prints one
// PASS/FAIL line per check. Exits nonzero if any check fails.
//
//   acceptance_tests [--cli-path <relaysim binary>] [--workers <n>]
//                    [--scale <fraction>]

#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "support/acceptance_suite.hpp"

int main(int argc, char** argv) {
  relaysim::acceptance::SuiteOptions opts;
  opts.workers = static_cast<int>(std::thread::hardware_concurrency());
  if (opts.workers < 1) opts.workers = 1;

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli-path" && i + 1 < argc) {
      opts.cli_path = argv[++i];
    } else if (arg == "--workers" && i + 1 < argc) {
      opts.workers = std::stoi(argv[++i]);
    } else if (arg == "--scale" && i + 1 < argc) {
      opts.scale = std::stod(argv[++i]);
    } else {
      std::cerr << "unknown argument: " << arg << '\n';
      return 2;
    }
  }

  const auto results = relaysim::acceptance::run_suite(opts, &std::cout);
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
  }
  std::cout << results.size() - failures << "/" << results.size() << " checks passed"
            << std::endl;
  return failures == 0 ? 0 : 4;
}
