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

// Global operator new/delete overrides that feed alloctrack. Link this
// translation unit into a binary to enable per-step allocation measurement;
// leave it out and the ledger reads zero.

#include <cstdlib>
#include <new>

#include "zoforge/alloc_track.hpp"

namespace {

[[maybe_unused]] const bool kHookRegistered = [] {
  zoforge::alloctrack::mark_hook_installed();
  return true;
}();

void* counted_alloc(std::size_t n) {
  zoforge::alloctrack::note_alloc(n);
  return std::malloc(n != 0 ? n : 1);
}

void* counted_aligned_alloc(std::size_t n, std::size_t align) {
  zoforge::alloctrack::note_alloc(n);
  // aligned_alloc requires the size to be a multiple of the alignment.
  const std::size_t padded = (n + align - 1) / align * align;
  return std::aligned_alloc(align, padded != 0 ? padded : align);
}

}  // namespace

void* operator new(std::size_t n) {
  if (void* p = counted_alloc(n)) return p;
  throw std::bad_alloc();
}

void* operator new[](std::size_t n) {
  if (void* p = counted_alloc(n)) return p;
  throw std::bad_alloc();
}

void* operator new(std::size_t n, const std::nothrow_t&) noexcept {
  return counted_alloc(n);
}

void* operator new[](std::size_t n, const std::nothrow_t&) noexcept {
  return counted_alloc(n);
}

void* operator new(std::size_t n, std::align_val_t align) {
  if (void* p = counted_aligned_alloc(n, static_cast<std::size_t>(align))) {
    return p;
  }
  throw std::bad_alloc();
}

void* operator new[](std::size_t n, std::align_val_t align) {
  if (void* p = counted_aligned_alloc(n, static_cast<std::size_t>(align))) {
    return p;
  }
  throw std::bad_alloc();
}

void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }

void operator delete(void* p, std::size_t n) noexcept {
  zoforge::alloctrack::note_free(n);
  std::free(p);
}

void operator delete[](void* p, std::size_t n) noexcept {
  zoforge::alloctrack::note_free(n);
  std::free(p);
}

void operator delete(void* p, const std::nothrow_t&) noexcept { std::free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept {
  std::free(p);
}

void operator delete(void* p, std::align_val_t) noexcept { std::free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { std::free(p); }

void operator delete(void* p, std::size_t n, std::align_val_t) noexcept {
  zoforge::alloctrack::note_free(n);
  std::free(p);
}

void operator delete[](void* p, std::size_t n, std::align_val_t) noexcept {
  zoforge::alloctrack::note_free(n);
  std::free(p);
}
