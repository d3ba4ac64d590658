#include "returnrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace returnrec {

namespace {

// Strict base-10 non-negative integer; the whole token must be digits.
template <typename T>
bool parse_uint(std::string_view token, T& out) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                   out, 10);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

const InteractionSequence* InteractionDataset::find(UserId user) const {
  auto it = std::lower_bound(
      sequences.begin(), sequences.end(), user,
      [](const InteractionSequence& s, UserId u) { return s.user < u; });
  if (it == sequences.end() || it->user != user) return nullptr;
  return &*it;
}

InteractionDataset parse_interactions(std::string_view text) {
  InteractionDataset ds;
  std::unordered_set<UserId> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    if (pos == text.size() && line_no > 0) break;
    std::size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') continue;

    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(line_no, "missing tab separator");

    InteractionSequence seq;
    if (!parse_uint(line.substr(0, tab), seq.user))
      throw ParseError(line_no, "invalid user id '" +
                                    std::string(line.substr(0, tab)) + "'");
    if (!seen.insert(seq.user).second)
      throw ParseError(line_no,
                       "duplicate user id " + std::to_string(seq.user));

    std::string_view items = line.substr(tab + 1);
    if (items.empty()) throw ParseError(line_no, "empty item list");
    std::size_t start = 0;
    while (true) {
      std::size_t comma = items.find(',', start);
      std::string_view token = (comma == std::string_view::npos)
                                   ? items.substr(start)
                                   : items.substr(start, comma - start);
      ItemId item = 0;
      if (!parse_uint(token, item))
        throw ParseError(line_no,
                         "invalid item id '" + std::string(token) + "'");
      seq.items.push_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    ds.sequences.push_back(std::move(seq));
  }

  std::sort(ds.sequences.begin(), ds.sequences.end(),
            [](const InteractionSequence& a, const InteractionSequence& b) {
              return a.user < b.user;
            });
  return ds;
}

InteractionDataset load_interactions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_interactions(buf.str());
}

std::string format_interactions(const InteractionDataset& ds) {
  std::string out;
  for (const auto& seq : ds.sequences) {
    out += std::to_string(seq.user);
    out += '\t';
    for (std::size_t i = 0; i < seq.items.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(seq.items[i]);
    }
    out += '\n';
  }
  return out;
}

void save_interactions(const InteractionDataset& ds,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_interactions(ds);
}

ItemCatalog build_catalog(const InteractionDataset& ds) {
  if (ds.sequences.empty())
    throw std::invalid_argument("cannot build a catalog from an empty dataset");
  ItemId max_id = 0;
  for (const auto& seq : ds.sequences)
    for (ItemId item : seq.items) max_id = std::max(max_id, item);
  ItemCatalog catalog;
  catalog.n_items = max_id + 1;
  return catalog;
}

HoldoutResult holdout_last(const InteractionDataset& ds) {
  HoldoutResult result;
  for (const auto& seq : ds.sequences) {
    if (seq.items.size() < 2) {
      ++result.skipped;
      continue;
    }
    EvaluationPair pair;
    pair.user = seq.user;
    pair.profile.assign(seq.items.begin(), seq.items.end() - 1);
    pair.target = seq.items.back();
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

}  // namespace returnrec
