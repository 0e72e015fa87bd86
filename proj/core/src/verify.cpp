#include "eqsat/verify.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <random>
#include <set>

#include <fmt/format.h>

namespace eqsat {

std::string_view verdict_name(Verdict v) {
  switch (v) {
  case Verdict::Equivalent: return "equivalent";
  case Verdict::Inequivalent: return "inequivalent";
  case Verdict::ProbablyEquivalent: return "probably-equivalent";
  }
  return "?";
}

namespace {

std::vector<std::size_t> output_permutation(const Circuit& a, const Circuit& b) {
  // perm[i] = index in b's outputs of a's i-th output name.
  std::vector<std::size_t> perm(a.outputs().size());
  for (std::size_t i = 0; i < a.outputs().size(); ++i) {
    const std::string& name = a.outputs()[i].first;
    auto it = std::find_if(b.outputs().begin(), b.outputs().end(),
                           [&](const auto& o) { return o.first == name; });
    perm[i] = static_cast<std::size_t>(it - b.outputs().begin());
  }
  return perm;
}

} // namespace

EquivalenceReport check_equivalence(const Circuit& a, const Circuit& b,
                                    std::size_t max_exhaustive_inputs,
                                    std::size_t vectors, std::uint64_t seed) {
  std::set<std::string> a_in(a.inputs().begin(), a.inputs().end());
  std::set<std::string> b_in(b.inputs().begin(), b.inputs().end());
  if (a_in != b_in)
    throw InterfaceMismatch("circuits expose different input names");
  auto names = [](const Circuit& c) {
    std::set<std::string> out;
    for (const auto& [name, r] : c.outputs())
      out.insert(name);
    return out;
  };
  if (names(a) != names(b))
    throw InterfaceMismatch("circuits expose different output names");

  // b's inputs indexed by a's input order.
  std::vector<std::size_t> b_input_of(a.inputs().size());
  for (std::size_t i = 0; i < a.inputs().size(); ++i) {
    auto span = b.inputs();
    b_input_of[i] = static_cast<std::size_t>(
        std::find(span.begin(), span.end(), a.inputs()[i]) - span.begin());
  }
  std::vector<std::size_t> out_perm = output_permutation(a, b);

  const std::size_t n = a.inputs().size();
  EquivalenceReport report;

  std::vector<std::uint64_t> wa(n), wb(n);
  auto compare_block = [&](std::uint64_t lane_mask,
                           const std::vector<std::uint64_t>& lane_value_of_input)
      -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (std::size_t i = 0; i < n; ++i) {
      wa[i] = lane_value_of_input[i];
      wb[b_input_of[i]] = lane_value_of_input[i];
    }
    std::vector<std::uint64_t> ra = simulate_words(a, wa);
    std::vector<std::uint64_t> rb = simulate_words(b, wb);
    for (std::size_t o = 0; o < ra.size(); ++o) {
      std::uint64_t diff = (ra[o] ^ rb[out_perm[o]]) & lane_mask;
      if (diff)
        return std::make_pair(o, static_cast<std::size_t>(std::countr_zero(diff)));
    }
    return std::nullopt;
  };

  auto fill_counterexample = [&](const std::vector<std::uint64_t>& lanes,
                                 std::size_t lane) {
    for (std::size_t i = 0; i < n; ++i)
      report.counterexample[a.inputs()[i]] = (lanes[i] >> lane) & 1;
  };

  std::vector<std::uint64_t> lanes(n, 0);
  if (n <= max_exhaustive_inputs) {
    report.method = VerifyMethod::Exhaustive;
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t base = 0; base < total; base += 64) {
      std::uint64_t block = std::min<std::uint64_t>(64, total - base);
      std::uint64_t mask = block == 64 ? ~0ull : (1ull << block) - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (i < 6) {
          // Lane-local counting patterns for the low six inputs.
          static constexpr std::uint64_t kPattern[6] = {
              0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
              0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
          lanes[i] = kPattern[i];
        } else {
          lanes[i] = ((base >> i) & 1) ? ~0ull : 0ull;
        }
      }
      report.vectors_tested += block;
      if (auto hit = compare_block(mask, lanes)) {
        report.verdict = Verdict::Inequivalent;
        fill_counterexample(lanes, hit->second);
        return report;
      }
    }
    report.verdict = Verdict::Equivalent;
    return report;
  }

  report.method = VerifyMethod::RandomVectors;
  std::mt19937_64 rng(seed);
  std::uint64_t remaining = vectors;
  while (remaining > 0) {
    std::uint64_t block = std::min<std::uint64_t>(64, remaining);
    std::uint64_t mask = block == 64 ? ~0ull : (1ull << block) - 1;
    for (std::size_t i = 0; i < n; ++i)
      lanes[i] = rng();
    report.vectors_tested += block;
    if (auto hit = compare_block(mask, lanes)) {
      report.verdict = Verdict::Inequivalent;
      fill_counterexample(lanes, hit->second);
      return report;
    }
    remaining -= block;
  }
  report.verdict = Verdict::ProbablyEquivalent;
  return report;
}

} // namespace eqsat
