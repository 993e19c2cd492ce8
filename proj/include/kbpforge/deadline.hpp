/*
 * Copyright (c) 2026, The kbpforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef KBPFORGE_DEADLINE_HPP_
#define KBPFORGE_DEADLINE_HPP_

#include <chrono>
#include <optional>
#include <stdexcept>

namespace kbpforge {

class TimeoutError : public std::runtime_error {
 public:
  TimeoutError() : std::runtime_error("time budget exhausted") {}
};

// Cooperative time budget, polled by long-running loops.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;  // unlimited
  static Deadline after(double seconds) {
    Deadline d;
    d.at_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(seconds));
    return d;
  }

  bool expired() const { return at_ && Clock::now() >= *at_; }
  void check() const {
    if (expired()) throw TimeoutError();
  }

 private:
  std::optional<Clock::time_point> at_;
};

}  // namespace kbpforge

#endif  // KBPFORGE_DEADLINE_HPP_
