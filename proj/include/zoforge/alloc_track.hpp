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

#pragma once

#include <cstddef>
#include <cstdint>

namespace zoforge::alloctrack {

// Per-thread heap accounting fed by the optional global operator new/delete
// hook (link target zoforge_new_hook). Without the hook all counters stay at
// zero and measured deltas degrade to 0.
//
// Counting is thread-local: a measuring thread only sees its own
// allocations. Unsized deallocations cannot be attributed and are ignored,
// which can only over-estimate the live figure, never hide an allocation.

// Called by the hook.
void note_alloc(std::size_t bytes) noexcept;
void note_free(std::size_t bytes) noexcept;
void mark_hook_installed() noexcept;

bool hook_installed() noexcept;

// Current live bytes and high-water mark on this thread since the last
// ledger arm (the ledger resets the peak when armed).
std::uint64_t current_bytes() noexcept;
std::uint64_t peak_bytes() noexcept;
void reset_peak_to_current() noexcept;

// Suspends counting on this thread for its lifetime. Used around loss
// forward passes: per-step accounting covers optimizer-internal work only,
// model activations are the forward pass's own business.
class PauseGuard {
 public:
  PauseGuard() noexcept;
  ~PauseGuard();
  PauseGuard(const PauseGuard&) = delete;
  PauseGuard& operator=(const PauseGuard&) = delete;
};

}  // namespace zoforge::alloctrack

namespace zoforge {

// Marks one measurement window on the calling thread: arm at the start of a
// step, read the peak-over-start delta after it. At most one ledger may be
// armed per thread at a time.
class AllocationLedger {
 public:
  void arm();
  // Peak bytes observed since arm() minus bytes at arm. Throws
  // std::logic_error if never armed.
  std::uint64_t read_delta() const;
  bool armed() const { return armed_; }

 private:
  bool armed_ = false;
  std::uint64_t bytes_at_start_ = 0;
};

}  // namespace zoforge
