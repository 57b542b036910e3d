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

#include "mscaec/allocator.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mscaec/status.h"

namespace mscaec {
namespace {

constexpr uint8_t kNoChoice = 0xff;
constexpr std::size_t kMaxMenu = 255;

// Best (quality, bytes) over the remaining images for one capacity.
struct Cell {
  double quality = 0.0;
  int64_t bytes = -1;  // -1: nothing fits
};

bool Better(double q, int64_t b, const Cell& cell) {
  if (cell.bytes < 0) return true;
  if (q != cell.quality) return q > cell.quality;
  return b < cell.bytes;
}

AllocationResult Summarise(const AllocationProblem& p, std::vector<int> choice,
                           bool feasible) {
  AllocationResult r;
  r.choice = std::move(choice);
  // Right fold, the same order the DP accumulates in.
  for (std::size_t i = p.images.size(); i-- > 0;) {
    const Candidate& c = p.images[i][r.choice[i]];
    r.total_bytes += c.bytes;
    r.total_quality = c.quality + r.total_quality;
  }
  r.feasible = feasible;
  return r;
}

AllocationResult Solve(const AllocationProblem& p,
                       const AllocatorOptions& options) {
  const std::size_t n = p.images.size();
  const int64_t g = options.granularity;
  const int64_t capacity = p.budget_bytes / g;
  if (static_cast<double>(n) * static_cast<double>(capacity + 1) >
      static_cast<double>(options.max_table_entries)) {
    throw ArgumentError("allocation table too large (" + std::to_string(n) +
                        " images x " + std::to_string(capacity + 1) +
                        " units); raise the granularity");
  }
  const std::size_t width = static_cast<std::size_t>(capacity) + 1;
  std::vector<uint8_t> table(n * width, kNoChoice);

  std::vector<Cell> next(width, Cell{0.0, 0});
  std::vector<Cell> cur(width);
  for (std::size_t i = n; i-- > 0;) {
    const auto& menu = p.images[i];
    std::vector<int64_t> cost(menu.size());
    for (std::size_t j = 0; j < menu.size(); ++j) {
      cost[j] = (menu[j].bytes + g - 1) / g;
    }
    for (std::size_t u = 0; u < width; ++u) {
      Cell best;
      uint8_t pick = kNoChoice;
      for (std::size_t j = 0; j < menu.size(); ++j) {
        if (cost[j] > static_cast<int64_t>(u)) continue;
        const Cell& rest = next[u - cost[j]];
        if (rest.bytes < 0) continue;
        const double q = menu[j].quality + rest.quality;
        const int64_t b = menu[j].bytes + rest.bytes;
        if (Better(q, b, best)) {
          best = {q, b};
          pick = static_cast<uint8_t>(j);
        }
      }
      cur[u] = best;
      table[i * width + u] = pick;
    }
    std::swap(cur, next);
  }

  std::vector<int> choice(n);
  std::size_t u = width - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const uint8_t pick = table[i * width + u];
    if (pick == kNoChoice) return {};
    choice[i] = pick;
    u -= (p.images[i][pick].bytes + g - 1) / g;
  }
  return Summarise(p, std::move(choice), true);
}

}  // namespace

void AllocationProblem::Validate() const {
  if (images.empty()) throw ArgumentError("allocation problem has no images");
  if (budget_bytes < 0) throw ArgumentError("budget must be non-negative");
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].empty()) {
      throw ArgumentError("image " + std::to_string(i) + " has no candidates");
    }
    for (const Candidate& c : images[i]) {
      if (c.bytes < 0) {
        throw ArgumentError("image " + std::to_string(i) +
                            " has a candidate with negative bytes");
      }
      if (!(c.quality >= 0.0 && c.quality <= 1.0)) {
        throw ArgumentError("image " + std::to_string(i) +
                            " has a candidate with quality outside [0, 1]");
      }
    }
  }
}

std::vector<int> ParetoCandidates(std::span<const Candidate> menu) {
  std::vector<int> keep;
  for (std::size_t j = 0; j < menu.size(); ++j) {
    bool dominated = false;
    for (std::size_t k = 0; k < menu.size() && !dominated; ++k) {
      dominated = menu[k].bytes <= menu[j].bytes &&
                  menu[k].quality >= menu[j].quality &&
                  (menu[k].bytes < menu[j].bytes ||
                   menu[k].quality > menu[j].quality);
    }
    if (!dominated) keep.push_back(static_cast<int>(j));
  }
  return keep;
}

int CheapestCandidate(std::span<const Candidate> menu) {
  int best = 0;
  for (std::size_t j = 1; j < menu.size(); ++j) {
    const Candidate& c = menu[j];
    if (c.bytes < menu[best].bytes ||
        (c.bytes == menu[best].bytes && c.quality > menu[best].quality)) {
      best = static_cast<int>(j);
    }
  }
  return best;
}

AllocationResult Allocate(const AllocationProblem& problem,
                          const AllocatorOptions& options) {
  problem.Validate();
  if (options.granularity < 1) {
    throw ArgumentError("granularity must be at least 1");
  }

  std::vector<int> cheapest(problem.images.size());
  int64_t min_total = 0;
  for (std::size_t i = 0; i < problem.images.size(); ++i) {
    cheapest[i] = CheapestCandidate(problem.images[i]);
    min_total += problem.images[i][cheapest[i]].bytes;
  }
  if (min_total > problem.budget_bytes) {
    return Summarise(problem, std::move(cheapest), false);
  }

  // Work on the kept candidates only, remembering where each came from.
  AllocationProblem reduced;
  reduced.budget_bytes = problem.budget_bytes;
  std::vector<std::vector<int>> origin(problem.images.size());
  for (std::size_t i = 0; i < problem.images.size(); ++i) {
    const auto& menu = problem.images[i];
    if (options.prune_dominated) {
      origin[i] = ParetoCandidates(menu);
    } else {
      for (std::size_t j = 0; j < menu.size(); ++j) {
        origin[i].push_back(static_cast<int>(j));
      }
    }
    if (origin[i].size() > kMaxMenu) {
      throw ArgumentError("image " + std::to_string(i) + " has more than " +
                          std::to_string(kMaxMenu) + " candidates");
    }
    std::vector<Candidate> kept;
    for (int j : origin[i]) kept.push_back(menu[j]);
    reduced.images.push_back(std::move(kept));
  }

  AllocationResult r = Solve(reduced, options);
  if (r.choice.empty()) {
    // Rounding costs up left no room, though the exact sizes fit.
    return Summarise(problem, std::move(cheapest), true);
  }
  std::vector<int> choice(problem.images.size());
  for (std::size_t i = 0; i < choice.size(); ++i) {
    choice[i] = origin[i][r.choice[i]];
  }
  return Summarise(problem, std::move(choice), true);
}

int64_t BudgetFromBpp(double bpp, std::span<const int64_t> pixel_counts) {
  if (!(bpp > 0.0) || !std::isfinite(bpp)) {
    throw ArgumentError("bpp must be positive");
  }
  int64_t pixels = 0;
  for (int64_t p : pixel_counts) {
    if (p <= 0) throw ArgumentError("pixel counts must be positive");
    pixels += p;
  }
  return static_cast<int64_t>(
      std::floor(bpp * static_cast<double>(pixels) / 8.0));
}

MenuSet ParseMenus(std::string_view text) {
  MenuSet out;
  std::map<std::string, std::size_t> index;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string s; fields >> s;) f.push_back(s);
    if (f.empty()) continue;
    auto fail = [&](const std::string& what) -> ParseError {
      return ParseError("menus line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 4 && f.size() != 5) {
      throw fail("expected 'image_id candidate_id bytes quality [pixels]'");
    }
    auto parse_int = [&](const std::string& s, const char* name) {
      int64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw fail(std::string("bad ") + name + " '" + s + "'");
      }
      return v;
    };
    Candidate c;
    c.bytes = parse_int(f[2], "bytes");
    {
      const std::string& s = f[3];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), c.quality);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw fail("bad quality '" + s + "'");
      }
    }
    const int64_t pixels = f.size() == 5 ? parse_int(f[4], "pixels") : 0;

    auto [it, inserted] = index.try_emplace(f[0], out.image_ids.size());
    if (inserted) {
      out.image_ids.push_back(f[0]);
      out.candidate_ids.emplace_back();
      out.menus.emplace_back();
      out.pixels.push_back(0);
    }
    const std::size_t i = it->second;
    if (pixels != 0) {
      if (out.pixels[i] != 0 && out.pixels[i] != pixels) {
        throw fail("pixel count for image '" + f[0] + "' changed");
      }
      out.pixels[i] = pixels;
    }
    out.candidate_ids[i].push_back(f[1]);
    out.menus[i].push_back(c);
  }
  return out;
}

}  // namespace mscaec
