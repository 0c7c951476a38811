#include <algorithm>
#include <sstream>

#include "metabbo/error.hpp"
#include "metabbo/problems.hpp"

namespace metabbo::problems {

bool ProblemSplit::is_seen(int function_id) const {
  return std::find(seen.begin(), seen.end(), function_id) != seen.end();
}

ProblemSplit split_problem_set(SplitMode mode, std::vector<int> dims, std::span<const int> custom_seen) {
  ProblemSplit split;
  split.dims = std::move(dims);
  for (int d : split.dims) {
    if (d < 2) throw Error(Errc::invalid_dimension, "dimension must be at least 2");
  }
  auto in = [](std::span<const int> list, int id) { return std::find(list.begin(), list.end(), id) != list.end(); };

  switch (mode) {
    case SplitMode::easy_train:
      for (int id = 1; id <= kNumFunctions; ++id) {
        (in(kEasyTrainUnseen, id) ? split.unseen : split.seen).push_back(id);
      }
      break;
    case SplitMode::all_train:
      for (int id = 1; id <= kNumFunctions; ++id) split.seen.push_back(id);
      break;
    case SplitMode::custom:
      if (custom_seen.empty()) throw Error(Errc::invalid_split, "custom split needs at least one function");
      for (int id : custom_seen) {
        if (id < 1 || id > kNumFunctions) {
          throw Error(Errc::invalid_split, "function id " + std::to_string(id) + " outside 1..24");
        }
      }
      for (int id = 1; id <= kNumFunctions; ++id) {
        (in(custom_seen, id) ? split.seen : split.unseen).push_back(id);
      }
      break;
  }
  return split;
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "easy-train") return SplitMode::easy_train;
  if (text == "all-train") return SplitMode::all_train;
  if (text.rfind("custom", 0) == 0) return SplitMode::custom;
  throw Error(Errc::invalid_split, "unknown split mode '" + text + "'");
}

ProblemSplit parse_split(const std::string& text, std::vector<int> dims) {
  const SplitMode mode = parse_split_mode(text);
  if (mode != SplitMode::custom) return split_problem_set(mode, std::move(dims));
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(Errc::invalid_split, "custom split must be 'custom:<ids>'");
  std::vector<int> ids;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      ids.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_split, "bad function id '" + item + "'");
    }
  }
  return split_problem_set(SplitMode::custom, std::move(dims), ids);
}

}  // namespace metabbo::problems
