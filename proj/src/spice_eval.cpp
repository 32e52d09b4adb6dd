#include "sgram/spice_eval.hpp"

#include <algorithm>

#include "sgram/error.hpp"

namespace sgram::eval {

namespace {

class Matcher {
 public:
  Matcher(std::size_t generated, std::size_t reference)
      : adj_(generated),
        match_g_(generated, kFree),
        match_r_(reference, kFree),
        seen_(reference, 0) {}

  void connect(std::size_t g, std::size_t r) { adj_[g].push_back(r); }

  void solve() {
    for (std::size_t g = 0; g < adj_.size(); ++g) {
      ++stamp_;
      augment(g);
    }
  }

  std::vector<Match> matches() const {
    std::vector<Match> out;
    for (std::size_t g = 0; g < match_g_.size(); ++g) {
      if (match_g_[g] != kFree) out.emplace_back(g, match_g_[g]);
    }
    return out;
  }

 private:
  static constexpr std::size_t kFree = static_cast<std::size_t>(-1);

  bool augment(std::size_t g) {
    for (std::size_t r : adj_[g]) {
      if (match_r_[r] == kFree) {
        take(g, r);
        return true;
      }
    }
    for (std::size_t r : adj_[g]) {
      if (seen_[r] == stamp_) continue;
      seen_[r] = stamp_;
      if (augment(match_r_[r])) {
        take(g, r);
        return true;
      }
    }
    return false;
  }

  void take(std::size_t g, std::size_t r) {
    match_g_[g] = r;
    match_r_[r] = g;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_g_;
  std::vector<std::size_t> match_r_;
  std::vector<unsigned> seen_;
  unsigned stamp_ = 0;
};

nlohmann::ordered_json region_json(const std::string& id,
                                   const EvalReport& r) {
  nlohmann::ordered_json j;
  j["region_id"] = id;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["matched"] = r.matches.size();
  j["generated"] = r.generated_size;
  j["reference"] = r.reference_size;
  return j;
}

}  // namespace

bool exact_match(const sg::Tuple& a, const sg::Tuple& b) {
  if (a.arity != b.arity) return false;
  for (std::size_t i = 0; i < a.arity; ++i) {
    if (a.fields[i] != b.fields[i]) return false;
  }
  return true;
}

std::vector<Match> match_tuples(const std::vector<sg::Tuple>& generated,
                                const std::vector<sg::Tuple>& reference,
                                const Compatibility& compatible) {
  Matcher m(generated.size(), reference.size());
  for (std::size_t g = 0; g < generated.size(); ++g) {
    for (std::size_t r = 0; r < reference.size(); ++r) {
      if (compatible(generated[g], reference[r])) m.connect(g, r);
    }
  }
  m.solve();
  return m.matches();
}

EvalReport f_score(const sg::SceneGraph& generated,
                   const sg::SceneGraph& reference,
                   const Compatibility& compatible) {
  const auto g = sg::to_tuples(generated);
  const auto r = sg::to_tuples(reference);
  EvalReport report;
  report.generated_size = g.size();
  report.reference_size = r.size();
  if (g.empty() && r.empty()) {
    report.precision = report.recall = report.f1 = 1.0;
    return report;
  }
  if (g.empty() || r.empty()) return report;

  report.matches = match_tuples(g, r, compatible);
  const double matched = static_cast<double>(report.matches.size());
  report.precision = matched / static_cast<double>(g.size());
  report.recall = matched / static_cast<double>(r.size());
  const double sum = report.precision + report.recall;
  report.f1 = sum > 0.0 ? 2.0 * report.precision * report.recall / sum : 0.0;
  return report;
}

CorpusReport evaluate_corpus(const std::vector<RegionPair>& pairs,
                             const Compatibility& compatible) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no regions to evaluate");
  }
  CorpusReport report;
  report.per_region.reserve(pairs.size());
  for (const auto& p : pairs) {
    report.per_region.emplace_back(
        p.region_id, f_score(p.generated, p.reference, compatible));
  }
  std::stable_sort(report.per_region.begin(), report.per_region.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [id, r] : report.per_region) total += r.f1;
  report.region_count = report.per_region.size();
  report.mean_f1 = total / static_cast<double>(report.region_count);
  return report;
}

std::string CorpusReport::to_jsonl(bool per_region_lines) const {
  std::string out;
  if (per_region_lines) {
    for (const auto& [id, r] : per_region) {
      out += region_json(id, r).dump();
      out += '\n';
    }
  }
  nlohmann::ordered_json summary;
  summary["summary"] = true;
  summary["regions"] = region_count;
  summary["mean_f1"] = mean_f1;
  out += summary.dump();
  out += '\n';
  return out;
}

}  // namespace sgram::eval
