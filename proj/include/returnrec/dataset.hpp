#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "returnrec/types.hpp"

namespace returnrec {

// One user's chronologically ordered interaction history (the user profile).
struct InteractionSequence {
  UserId user = 0;
  std::vector<ItemId> items;

  bool operator==(const InteractionSequence&) const = default;
};

enum class DatasetRole { external_database, evaluation_set };

// A set of user profiles. Doubles as the external database (graph source)
// and as the evaluation corpus. Sequences are kept sorted by user id.
struct InteractionDataset {
  std::vector<InteractionSequence> sequences;
  DatasetRole role = DatasetRole::external_database;

  const InteractionSequence* find(UserId user) const;
  bool operator==(const InteractionDataset& other) const {
    return sequences == other.sequences;
  }
};

// Dense item id space [0, n_items). Display names are optional metadata;
// all algorithms operate on ids.
struct ItemCatalog {
  std::uint32_t n_items = 0;
  std::unordered_map<ItemId, std::string> names;
};

// Leave-one-out pair: profile is the history minus its last item, which
// becomes the prediction target.
struct EvaluationPair {
  UserId user = 0;
  std::vector<ItemId> profile;
  ItemId target = 0;
};

struct HoldoutResult {
  std::vector<EvaluationPair> pairs;
  std::size_t skipped = 0;  // users with a single interaction
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Interaction-log format: one sequence per line,
//   <user_id><TAB><item_id>(,<item_id>)*
// base-10 non-negative ids, no spaces; '#' lines and blank lines ignored.
InteractionDataset parse_interactions(std::string_view text);
InteractionDataset load_interactions(const std::filesystem::path& path);

// Canonical writer: lines sorted by user id. parse(format(ds)) == ds.
std::string format_interactions(const InteractionDataset& ds);
void save_interactions(const InteractionDataset& ds,
                       const std::filesystem::path& path);

// n_items = max item id appearing anywhere + 1. Throws on an empty dataset.
ItemCatalog build_catalog(const InteractionDataset& ds);

// Splits each sequence into (all-but-last, last). Sequences of length 1 are
// skipped and counted.
HoldoutResult holdout_last(const InteractionDataset& ds);

}  // namespace returnrec
