// Copyright 2026 The RephraseTTS Authors
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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "rptts/common/rng.h"
#include "rptts/dsp/spectral.h"
#include "rptts/eval/metrics.h"
#include "rptts/losses/mining.h"
#include "rptts/verify/suites.h"

namespace rptts::verify {
namespace {

using losses::Triplet;
using losses::WindowSource;
using TripletSet = std::set<std::tuple<int, int, int>>;

TripletSet as_set(const std::vector<Triplet>& ts) {
  TripletSet s;
  for (const auto& t : ts) s.insert({t.anchor, t.positive, t.negative});
  return s;
}

// Index sets per utterance, built straight from the provenance table.
struct Groups {
  std::vector<std::vector<int>> real, synth;
};

Groups group(const std::vector<WindowSource>& table, int n_examples) {
  Groups g;
  g.real.resize(n_examples);
  g.synth.resize(n_examples);
  for (int i = 0; i < static_cast<int>(table.size()); ++i) {
    (table[i].synthesized ? g.synth : g.real)[table[i].example].push_back(i);
  }
  return g;
}

TripletSet oracle_style(const std::vector<WindowSource>& table, int n_examples) {
  const Groups g = group(table, n_examples);
  TripletSet out;
  for (int e = 0; e < n_examples; ++e) {
    std::vector<int> negatives;
    for (int f = 0; f < n_examples; ++f) {
      if (f != e) negatives.insert(negatives.end(), g.real[f].begin(), g.real[f].end());
      negatives.insert(negatives.end(), g.synth[f].begin(), g.synth[f].end());
    }
    for (int a : g.real[e]) {
      for (int p : g.real[e]) {
        if (p == a) continue;
        for (int n : negatives) out.insert({a, p, n});
      }
    }
  }
  return out;
}

TripletSet oracle_generator(const std::vector<WindowSource>& table, int n_examples) {
  const Groups g = group(table, n_examples);
  TripletSet out;
  for (int e = 0; e < n_examples; ++e) {
    std::vector<int> negatives;
    for (int f = 0; f < n_examples; ++f) {
      if (f == e) continue;
      negatives.insert(negatives.end(), g.real[f].begin(), g.real[f].end());
      negatives.insert(negatives.end(), g.synth[f].begin(), g.synth[f].end());
    }
    for (int a : g.synth[e]) {
      for (int p : g.real[e]) {
        for (int n : negatives) out.insert({a, p, n});
      }
    }
  }
  return out;
}

std::vector<WindowSource> make_table(const std::vector<int>& real_counts,
                                     const std::vector<int>& synth_counts) {
  std::vector<WindowSource> t;
  for (int e = 0; e < static_cast<int>(real_counts.size()); ++e) {
    for (int j = 0; j < real_counts[e]; ++j) t.push_back({e, false, j * 48});
  }
  for (int e = 0; e < static_cast<int>(synth_counts.size()); ++e) {
    for (int j = 0; j < synth_counts[e]; ++j) t.push_back({e, true, j * 48});
  }
  return t;
}

// Brute force: the cheapest of all monotone paths from (0,0) to (n-1,m-1).
double brute_force_dtw(const dsp::MatrixD& c) {
  const int n = static_cast<int>(c.rows()), m = static_cast<int>(c.cols());
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
    acc = acc + c(i, j);
    if (i == n - 1 && j == m - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

bool valid_path(const eval::DtwResult& r, int n, int m, const dsp::MatrixD& c) {
  if (r.path.empty() || r.path.front() != std::pair{0, 0} ||
      r.path.back() != std::pair{n - 1, m - 1}) {
    return false;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < r.path.size(); ++k) {
    acc = acc + c(r.path[k].first, r.path[k].second);
    if (k == 0) continue;
    const int di = r.path[k].first - r.path[k - 1].first;
    const int dj = r.path[k].second - r.path[k - 1].second;
    if (di < 0 || dj < 0 || di > 1 || dj > 1 || di + dj == 0) return false;
  }
  return acc == r.cost;
}

}  // namespace

bool SuiteResult::passed() const { return failures() == 0; }

int SuiteResult::failures() const {
  return static_cast<int>(
      std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return !c.passed; }));
}

void SuiteResult::print(std::ostream& out) const {
  for (const auto& c : cases) {
    out << "[" << suite << "] " << (c.passed ? "ok   " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << ": " << c.detail;
    out << "\n";
  }
  out << "[" << suite << "] " << cases.size() - failures() << "/" << cases.size() << " passed\n";
}

SuiteResult run_mining_suite(std::uint64_t seed) {
  SuiteResult res;
  res.suite = "mining";
  Rng rng(seed);

  {
    const auto table = make_table({2, 2}, {2, 2});
    const auto ts = losses::mine_triplets_style(table);
    const auto tg = losses::mine_triplets_generator(table);
    res.cases.push_back({"battery |T_s|", ts.size() == 24, std::to_string(ts.size()) + " (want 24)"});
    res.cases.push_back({"battery |T_G|", tg.size() == 32, std::to_string(tg.size()) + " (want 32)"});
  }
  {
    const auto table = make_table({2}, {});
    res.cases.push_back({"single utterance without synthesis",
                         losses::mine_triplets_style(table).empty() &&
                             losses::mine_triplets_generator(table).empty(),
                         "no negatives, no triplets"});
  }

  // Every per-utterance (real, synthesized) window count up to 4 x 4 for one
  // and two utterances, and uniform shapes up to 4 utterances.
  int tables = 0, mismatches = 0;
  std::string first_bad;
  auto compare = [&](std::vector<WindowSource> table, int n_examples) {
    std::shuffle(table.begin(), table.end(), rng);
    ++tables;
    const bool ok =
        as_set(losses::mine_triplets_style(table)) == oracle_style(table, n_examples) &&
        as_set(losses::mine_triplets_generator(table)) == oracle_generator(table, n_examples) &&
        losses::mine_triplets_style(table).size() == oracle_style(table, n_examples).size() &&
        losses::mine_triplets_generator(table).size() == oracle_generator(table, n_examples).size();
    if (!ok && mismatches++ == 0) first_bad = "table of " + std::to_string(table.size());
  };
  for (int r0 = 0; r0 <= 4; ++r0) {
    for (int s0 = 0; s0 <= 4; ++s0) {
      compare(make_table({r0}, {s0}), 1);
      for (int r1 = 0; r1 <= 4; ++r1) {
        for (int s1 = 0; s1 <= 4; ++s1) compare(make_table({r0, r1}, {s0, s1}), 2);
      }
    }
  }
  for (int b = 1; b <= 4; ++b) {
    for (int w = 1; w <= 4; ++w) {
      compare(make_table(std::vector<int>(b, w), std::vector<int>(b, w)), b);
    }
  }
  std::uniform_int_distribution<int> count(0, 4);
  for (int k = 0; k < 300; ++k) {
    const int b = 1 + k % 4;
    std::vector<int> rc(b), sc(b);
    for (int e = 0; e < b; ++e) {
      rc[e] = count(rng);
      sc[e] = count(rng);
    }
    compare(make_table(rc, sc), b);
  }
  res.cases.push_back({"miners equal enumeration", mismatches == 0,
                       std::to_string(tables) + " tables, " + std::to_string(mismatches) +
                           " mismatches" + (first_bad.empty() ? "" : ", first: " + first_bad)});
  return res;
}

SuiteResult run_dtw_suite(std::uint64_t seed, int matrices) {
  SuiteResult res;
  res.suite = "dtw";
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  std::string first_bad;
  for (int k = 0; k < matrices; ++k) {
    const int n = 1 + k % 8, m = 1 + (k / 8) % 8;
    dsp::MatrixD c(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) c(i, j) = u(rng);
    }
    const auto r = eval::dtw(c);
    const double want = brute_force_dtw(c);
    if (r.cost != want || !valid_path(r, n, m, c)) {
      if (bad++ == 0) {
        std::ostringstream s;
        s.precision(17);
        s << n << "x" << m << ": dp " << r.cost << " vs brute force " << want;
        first_bad = s.str();
      }
    }
  }
  res.cases.push_back({"dp equals exhaustive paths", bad == 0,
                       std::to_string(matrices) + " matrices up to 8x8, " +
                           std::to_string(bad) + " mismatches" +
                           (first_bad.empty() ? "" : ", first: " + first_bad)});
  {
    dsp::MatrixD c(1, 3);
    c << 0, 0, 0;
    const auto r = eval::dtw(c);
    res.cases.push_back({"repetition absorbed", r.cost == 0.0 && r.path.size() == 3,
                         "one frame against three equal frames"});
  }
  return res;
}

SuiteResult run_mfcc_suite(std::uint64_t seed) {
  SuiteResult res;
  res.suite = "mfcc";
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-11.5, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    dsp::MelSpectrogram mel;
    mel.frames.resize(4, 80);
    for (int i = 0; i < mel.frames.size(); ++i) mel.frames.data()[i] = u(rng);
    const auto c = dsp::mfcc(mel);
    const int n = 80;
    for (int f = 0; f < 4; ++f) {
      for (int k = 0; k < dsp::kNumMfcc; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          s += mel.frames(f, i) * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
        }
        s *= k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        worst = std::max(worst, std::abs(s - c.frames(f, k)));
      }
    }
  }
  std::ostringstream d;
  d << "max abs diff " << worst;
  res.cases.push_back({"mfcc equals direct DCT-II", worst < 1e-9, d.str()});
  return res;
}

}  // namespace rptts::verify
