// Copyright 2026 The ZO-Forge Authors.
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

#include "zoforge/alloc_track.hpp"

#include <atomic>
#include <stdexcept>

namespace zoforge::alloctrack {
namespace {

struct ThreadCounters {
  std::uint64_t current = 0;
  std::uint64_t peak = 0;
  int pause_depth = 0;
};

thread_local ThreadCounters tl_counters;
std::atomic<bool> g_hook_installed{false};

}  // namespace

void note_alloc(std::size_t bytes) noexcept {
  ThreadCounters& c = tl_counters;
  if (c.pause_depth > 0) return;
  c.current += bytes;
  if (c.current > c.peak) c.peak = c.current;
}

void note_free(std::size_t bytes) noexcept {
  ThreadCounters& c = tl_counters;
  if (c.pause_depth > 0) return;
  c.current -= (bytes <= c.current) ? bytes : c.current;
}

void mark_hook_installed() noexcept {
  g_hook_installed.store(true, std::memory_order_relaxed);
}

bool hook_installed() noexcept {
  return g_hook_installed.load(std::memory_order_relaxed);
}

std::uint64_t current_bytes() noexcept { return tl_counters.current; }

std::uint64_t peak_bytes() noexcept { return tl_counters.peak; }

void reset_peak_to_current() noexcept { tl_counters.peak = tl_counters.current; }

PauseGuard::PauseGuard() noexcept { ++tl_counters.pause_depth; }

PauseGuard::~PauseGuard() { --tl_counters.pause_depth; }

}  // namespace zoforge::alloctrack

namespace zoforge {

void AllocationLedger::arm() {
  bytes_at_start_ = alloctrack::current_bytes();
  alloctrack::reset_peak_to_current();
  armed_ = true;
}

std::uint64_t AllocationLedger::read_delta() const {
  if (!armed_) {
    throw std::logic_error("AllocationLedger: read_delta before arm");
  }
  const std::uint64_t peak = alloctrack::peak_bytes();
  return peak > bytes_at_start_ ? peak - bytes_at_start_ : 0;
}

}  // namespace zoforge
