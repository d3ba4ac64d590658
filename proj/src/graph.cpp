#include "returnrec/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace returnrec {

namespace {

const std::unordered_map<ItemId, Count> kEmptyRow;

template <typename T>
bool parse_uint(std::string_view token, T& out) {
  if (token.empty()) return false;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out, 10);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

MultiHopGraph::MultiHopGraph(int max_hop, std::uint32_t n_items)
    : max_hop_(max_hop), n_items_(n_items) {
  if (max_hop < 1) throw std::invalid_argument("max_hop must be >= 1");
  if (n_items < 1) throw std::invalid_argument("n_items must be >= 1");
  adj_.resize(static_cast<std::size_t>(max_hop));
  row_sums_.resize(static_cast<std::size_t>(max_hop));
  for (int h = 0; h < max_hop; ++h) {
    adj_[h].resize(n_items);
    row_sums_[h].assign(n_items, 0);
  }
}

MultiHopGraph MultiHopGraph::build(const InteractionDataset& db, int max_hop,
                                   std::uint32_t n_items) {
  if (db.sequences.empty())
    throw std::invalid_argument("cannot build a graph from an empty dataset");
  if (n_items == 0) n_items = build_catalog(db).n_items;
  MultiHopGraph g(max_hop, n_items);
  for (const auto& seq : db.sequences) {
    const auto& items = seq.items;
    const std::size_t len = items.size();
    const std::size_t hop_cap =
        std::min<std::size_t>(static_cast<std::size_t>(max_hop),
                              len == 0 ? 0 : len - 1);
    for (std::size_t hop = 1; hop <= hop_cap; ++hop)
      for (std::size_t p = 0; p + hop < len; ++p)
        g.add_pair(items[p], items[p + hop], static_cast<int>(hop));
  }
  return g;
}

void MultiHopGraph::add_pair(ItemId a, ItemId b, int hop, Count c) {
  if (hop < 1 || hop > max_hop_) throw std::out_of_range("hop out of range");
  if (a >= n_items_ || b >= n_items_)
    throw std::out_of_range("item id outside the catalog");
  auto& rows = adj_[static_cast<std::size_t>(hop - 1)];
  auto& sums = row_sums_[static_cast<std::size_t>(hop - 1)];
  rows[a][b] += c;
  sums[a] += c;
  if (a != b) {
    rows[b][a] += c;
    sums[b] += c;
  }
}

Count MultiHopGraph::co_count(ItemId a, ItemId b, int hop) const {
  if (a >= n_items_ || b >= n_items_)
    throw std::out_of_range("item id outside the catalog");
  if (hop < 1 || hop > max_hop_) return 0;
  const auto& row = adj_[static_cast<std::size_t>(hop - 1)][a];
  auto it = row.find(b);
  return it == row.end() ? 0 : it->second;
}

Count MultiHopGraph::row_sum(ItemId a, int hop) const {
  if (a >= n_items_) throw std::out_of_range("item id outside the catalog");
  if (hop < 1 || hop > max_hop_) return 0;
  return row_sums_[static_cast<std::size_t>(hop - 1)][a];
}

const std::unordered_map<ItemId, Count>& MultiHopGraph::neighbors(
    ItemId a, int hop) const {
  if (a >= n_items_) throw std::out_of_range("item id outside the catalog");
  if (hop < 1 || hop > max_hop_) return kEmptyRow;
  return adj_[static_cast<std::size_t>(hop - 1)][a];
}

std::size_t MultiHopGraph::stored_pairs(int hop) const {
  if (hop < 1 || hop > max_hop_) return 0;
  std::size_t n = 0;
  const auto& rows = adj_[static_cast<std::size_t>(hop - 1)];
  for (ItemId a = 0; a < n_items_; ++a)
    for (const auto& [b, count] : rows[a])
      if (b >= a) ++n;
  return n;
}

std::string MultiHopGraph::serialize() const {
  std::string out = "RETURN-GRAPH v1 max_hop=" + std::to_string(max_hop_) +
                    " n_items=" + std::to_string(n_items_) + "\n";
  for (int hop = 1; hop <= max_hop_; ++hop) {
    const auto& rows = adj_[static_cast<std::size_t>(hop - 1)];
    for (ItemId a = 0; a < n_items_; ++a) {
      std::vector<std::pair<ItemId, Count>> entries;
      for (const auto& [b, count] : rows[a])
        if (b >= a) entries.emplace_back(b, count);
      std::sort(entries.begin(), entries.end());
      for (const auto& [b, count] : entries) {
        out += std::to_string(hop);
        out += '\t';
        out += std::to_string(a);
        out += '\t';
        out += std::to_string(b);
        out += '\t';
        out += std::to_string(count);
        out += '\n';
      }
    }
  }
  return out;
}

void MultiHopGraph::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize();
}

MultiHopGraph MultiHopGraph::parse(std::string_view text) {
  std::size_t eol = text.find('\n');
  if (eol == std::string_view::npos)
    throw GraphLoadError("missing or truncated header");
  std::string_view header = text.substr(0, eol);

  int max_hop = 0;
  std::uint32_t n_items = 0;
  {
    std::istringstream hs{std::string(header)};
    std::string magic, version, hop_field, items_field;
    hs >> magic >> version >> hop_field >> items_field;
    if (magic != "RETURN-GRAPH" || version != "v1")
      throw GraphLoadError("unsupported graph format header '" +
                           std::string(header) + "'");
    if (hop_field.rfind("max_hop=", 0) != 0 ||
        items_field.rfind("n_items=", 0) != 0 ||
        !parse_uint(std::string_view(hop_field).substr(8), max_hop) ||
        !parse_uint(std::string_view(items_field).substr(8), n_items))
      throw GraphLoadError("malformed graph header '" + std::string(header) +
                           "'");
  }
  if (max_hop < 1 || n_items < 1)
    throw GraphLoadError("graph header out of range");

  MultiHopGraph g(max_hop, n_items);
  int prev_hop = 0;
  ItemId prev_i = 0, prev_j = 0;
  std::size_t line_no = 1;
  std::size_t pos = eol + 1;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string_view line = (end == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, end - pos);
    pos = (end == std::string_view::npos) ? text.size() : end + 1;
    ++line_no;
    if (end == std::string_view::npos)
      throw GraphLoadError("truncated record at line " +
                           std::to_string(line_no));

    int hop = 0;
    ItemId i = 0, j = 0;
    Count count = 0;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    std::size_t t3 = t2 == std::string_view::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string_view::npos ||
        !parse_uint(line.substr(0, t1), hop) ||
        !parse_uint(line.substr(t1 + 1, t2 - t1 - 1), i) ||
        !parse_uint(line.substr(t2 + 1, t3 - t2 - 1), j) ||
        !parse_uint(line.substr(t3 + 1), count))
      throw GraphLoadError("malformed record at line " +
                           std::to_string(line_no));

    if (hop < 1 || hop > max_hop)
      throw GraphLoadError("record hop " + std::to_string(hop) +
                           " contradicts header max_hop=" +
                           std::to_string(max_hop) + " at line " +
                           std::to_string(line_no));
    if (i >= n_items || j >= n_items)
      throw GraphLoadError("record item outside n_items at line " +
                           std::to_string(line_no));
    if (i > j)
      throw GraphLoadError("record not in canonical i <= j form at line " +
                           std::to_string(line_no));
    if (count < 1)
      throw GraphLoadError("zero count stored at line " +
                           std::to_string(line_no));
    if (prev_hop > 0) {
      const bool ascending =
          std::tuple(hop, i, j) > std::tuple(prev_hop, prev_i, prev_j);
      if (!ascending)
        throw GraphLoadError("records out of order at line " +
                             std::to_string(line_no));
    }
    prev_hop = hop;
    prev_i = i;
    prev_j = j;
    g.add_pair(i, j, hop, count);
  }
  return g;
}

MultiHopGraph MultiHopGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphLoadError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool MultiHopGraph::operator==(const MultiHopGraph& other) const {
  return max_hop_ == other.max_hop_ && n_items_ == other.n_items_ &&
         adj_ == other.adj_ && row_sums_ == other.row_sums_;
}

}  // namespace returnrec
