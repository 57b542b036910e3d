// Copyright 2026 The mscaec Authors.
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

// Picks one encoded stream per image so that total quality is maximal while
// the summed size stays within a byte budget (multiple-choice knapsack).

#ifndef MSCAEC_ALLOCATOR_H_
#define MSCAEC_ALLOCATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mscaec {

struct Candidate {
  int64_t bytes = 0;
  double quality = 0.0;  // MS-SSIM, in [0, 1]

  bool operator==(const Candidate&) const = default;
};

struct AllocationProblem {
  std::vector<std::vector<Candidate>> images;
  int64_t budget_bytes = 0;

  // Throws ArgumentError on an empty problem, an empty menu, negative bytes
  // or budget, or a quality outside [0, 1].
  void Validate() const;
};

struct AllocationResult {
  std::vector<int> choice;  // candidate index per image
  int64_t total_bytes = 0;
  double total_quality = 0.0;
  bool feasible = false;
};

struct AllocatorOptions {
  // Costs are ceil(bytes / g) units and the capacity floor(budget / g), so a
  // feasible answer never exceeds the budget. g = 1 is exact.
  int64_t granularity = 64;
  bool prune_dominated = true;
  // Refuse problems whose choice table would exceed this many entries.
  int64_t max_table_entries = int64_t{1} << 31;
};

// Ties on total quality go to fewer total bytes, then to the
// lexicographically smallest choice vector. When even the cheapest stream
// of every image overshoots the budget the result is that all-cheapest
// assignment with feasible = false.
AllocationResult Allocate(const AllocationProblem& problem,
                          const AllocatorOptions& options = {});

// Indices of candidates not dominated by another one (no more bytes and no
// less quality, strictly better in one), in original order.
std::vector<int> ParetoCandidates(std::span<const Candidate> menu);

// Index of the cheapest candidate; among equal sizes the best quality, then
// the lowest index.
int CheapestCandidate(std::span<const Candidate> menu);

// floor(bpp * sum(pixels) / 8). Throws ArgumentError unless bpp > 0 and
// every count is positive.
int64_t BudgetFromBpp(double bpp, std::span<const int64_t> pixel_counts);

// Candidate menus read from text, one record per line:
//   image_id candidate_id bytes quality [pixels]
// Blank lines and '#' comments are ignored. Images keep the order in which
// they first appear.
struct MenuSet {
  std::vector<std::string> image_ids;
  std::vector<std::vector<std::string>> candidate_ids;
  std::vector<std::vector<Candidate>> menus;
  // Per image; 0 when no record gave a pixel count.
  std::vector<int64_t> pixels;
};

// Throws ParseError with the offending line number.
MenuSet ParseMenus(std::string_view text);

}  // namespace mscaec

#endif  // MSCAEC_ALLOCATOR_H_
