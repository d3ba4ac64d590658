#include "returnrec/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

namespace returnrec {

int hit_at_k(std::span<const ItemId> list, ItemId target, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const std::size_t depth =
      std::min<std::size_t>(list.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < depth; ++r)
    if (list[r] == target) return 1;
  return 0;
}

double ndcg_at_k(std::span<const ItemId> list, ItemId target, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const std::size_t depth =
      std::min<std::size_t>(list.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < depth; ++r)
    if (list[r] == target)
      return 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return 0.0;
}

std::optional<double> attack_degradation(double benign, double attacked) {
  if (benign <= 0.0) return std::nullopt;
  return 1.0 - attacked / benign;
}

std::optional<double> defense_gain(double undefended_degradation,
                                   double defended_degradation) {
  if (undefended_degradation == 0.0) return std::nullopt;
  return 1.0 - defended_degradation / undefended_degradation;
}

PurifiedProfile baseline_rd(std::span<const ItemId> profile, std::size_t count,
                            Rng& rng) {
  if (count > profile.size())
    throw std::invalid_argument("cannot delete more items than the profile holds");
  std::vector<std::size_t> positions(profile.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  // Partial Fisher-Yates: the first `count` entries are the deletions.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.bounded(positions.size() - i);
    std::swap(positions[i], positions[j]);
  }
  positions.resize(count);
  std::sort(positions.begin(), positions.end());

  PurifiedProfile out;
  std::vector<bool> drop(profile.size(), false);
  for (std::size_t p : positions) {
    drop[p] = true;
    out.edits.push_back({p, EditAction::deleted, profile[p], 0});
  }
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (!drop[i]) out.items.push_back(profile[i]);
  return out;
}

RecommendationList baseline_rde(const Recommender& recommender, UserId user,
                                std::span<const ItemId> profile, int m,
                                std::size_t count, Rng& rng, int k,
                                VoteRule rule) {
  if (m < 1) throw std::invalid_argument("ensemble size must be >= 1");
  std::vector<RecommendationList> lists;
  lists.reserve(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t) {
    const PurifiedProfile cleansed = baseline_rd(profile, count, rng);
    lists.push_back(recommender.recommend(user, cleansed.items, k));
  }
  return fuse_lists(lists, k, rule);
}

namespace {

double entropy_bits(const std::unordered_map<ItemId, std::size_t>& freq,
                    std::size_t total) {
  double h = 0.0;
  for (const auto& [item, n] : freq) {
    const double p = static_cast<double>(n) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

BenignImpact benign_impact(const std::vector<RecommendationList>& first,
                           const std::vector<RecommendationList>& second) {
  if (first.empty() || second.empty())
    throw std::invalid_argument("benign_impact requires non-empty list sets");
  if (first.size() != second.size())
    throw std::invalid_argument("benign_impact requires matching users");

  std::unordered_map<ItemId, std::size_t> freq_a, freq_b;
  std::size_t slots_a = 0, slots_b = 0;
  for (const auto& list : first)
    for (ItemId item : list) ++freq_a[item], ++slots_a;
  for (const auto& list : second)
    for (ItemId item : list) ++freq_b[item], ++slots_b;
  if (slots_a == 0 || slots_b == 0)
    throw std::invalid_argument("benign_impact requires non-empty lists");

  std::size_t inter = 0;
  std::size_t common_slots = 0;
  for (const auto& [item, n] : freq_a) {
    auto it = freq_b.find(item);
    if (it != freq_b.end()) {
      ++inter;
      common_slots += n + it->second;
    }
  }
  const std::size_t uni = freq_a.size() + freq_b.size() - inter;

  BenignImpact out;
  out.jaccard = static_cast<double>(inter) / static_cast<double>(uni);
  out.common_ratio = static_cast<double>(common_slots) /
                     static_cast<double>(slots_a + slots_b);
  out.entropy_first = entropy_bits(freq_a, slots_a);
  out.entropy_second = entropy_bits(freq_b, slots_b);
  return out;
}

namespace {

std::string format_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

std::string format_report_csv(std::vector<ReportRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              return std::tie(a.condition, a.method, a.k) <
                     std::tie(b.condition, b.method, b.k);
            });
  std::string out = "condition,method,k,hit,ndcg,a_hit,a_ndcg,d_hit,d_ndcg\n";
  for (const auto& row : rows) {
    out += row.condition;
    out += ',';
    out += row.method;
    out += ',';
    out += std::to_string(row.k);
    out += ',';
    out += format_cell(row.hit);
    out += ',';
    out += format_cell(row.ndcg);
    out += ',';
    out += format_cell(row.a_hit);
    out += ',';
    out += format_cell(row.a_ndcg);
    out += ',';
    out += format_cell(row.d_hit);
    out += ',';
    out += format_cell(row.d_ndcg);
    out += '\n';
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      cells.push_back(comma == std::string_view::npos
                          ? line.substr(start)
                          : line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 9)
      throw std::runtime_error("malformed report row: " + std::string(line));
    auto to_opt = [](std::string_view cell) -> std::optional<double> {
      if (cell.empty()) return std::nullopt;
      return std::stod(std::string(cell));
    };
    ReportRow row;
    row.condition = std::string(cells[0]);
    row.method = std::string(cells[1]);
    row.k = std::stoi(std::string(cells[2]));
    row.hit = to_opt(cells[3]).value_or(0.0);
    row.ndcg = to_opt(cells[4]).value_or(0.0);
    row.a_hit = to_opt(cells[5]);
    row.a_ndcg = to_opt(cells[6]);
    row.d_hit = to_opt(cells[7]);
    row.d_ndcg = to_opt(cells[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace returnrec
