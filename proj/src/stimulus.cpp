#include "attachlab/stimulus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "attachlab/errors.hpp"

namespace attachlab {

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool contains(const std::vector<std::string>& tokens, const char* word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

}  // namespace

void StimulusPair::validate() const {
  if (high_agree.empty() || low_agree.empty()) {
    throw DataError("stimulus pair " + item_id + ": empty sentence");
  }
  if (target_high >= high_agree.size() || target_low >= low_agree.size()) {
    throw DataError("stimulus pair " + item_id + ": target index out of range");
  }
  if (high_agree[target_high] != low_agree[target_low]) {
    throw DataError("stimulus pair " + item_id + ": target token mismatch ('" +
                    high_agree[target_high] + "' vs '" + low_agree[target_low] + "')");
  }
  if (high_agree.size() != low_agree.size()) {
    // Only the Spanish "de el -> del" contraction may change the length,
    // and only by one token.
    const std::size_t a = high_agree.size(), b = low_agree.size();
    const bool del_ok = language == "spanish" && (a > b ? a - b : b - a) == 1 &&
                        (contains(high_agree, "del") || contains(low_agree, "del"));
    if (!del_ok) {
      throw DataError("stimulus pair " + item_id + ": member lengths differ");
    }
  }
}

std::vector<StimulusPair> load_stimulus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stimulus file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty stimulus file");

  struct Row {
    std::string template_id, condition, language, sentence;
    std::size_t target_index;
  };
  std::map<std::string, std::vector<Row>> by_item;
  std::vector<std::string> item_order;

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 6) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 6 columns, got " +
                      std::to_string(fields.size()));
    }
    Row row{fields[1], fields[2], fields[3], fields[4], 0};
    try {
      row.target_index = std::stoul(fields[5]);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": bad target_index '" + fields[5] +
                      "'");
    }
    if (by_item.find(fields[0]) == by_item.end()) item_order.push_back(fields[0]);
    by_item[fields[0]].push_back(std::move(row));
  }

  std::vector<StimulusPair> pairs;
  pairs.reserve(item_order.size());
  for (const auto& item : item_order) {
    const auto& rows = by_item[item];
    if (rows.size() != 2) {
      throw DataError(path + ": item " + item + " has " + std::to_string(rows.size()) +
                      " rows, expected 2 (high_agree + low_agree)");
    }
    StimulusPair pair;
    pair.item_id = item;
    for (const Row& row : rows) {
      if (row.condition == "high_agree") {
        pair.high_agree = tokenize(row.sentence);
        pair.target_high = row.target_index;
      } else if (row.condition == "low_agree") {
        pair.low_agree = tokenize(row.sentence);
        pair.target_low = row.target_index;
      } else {
        throw DataError(path + ": item " + item + ": unknown condition '" + row.condition + "'");
      }
      pair.template_id = row.template_id;
      pair.language = row.language;
    }
    if (pair.high_agree.empty() || pair.low_agree.empty()) {
      throw DataError(path + ": item " + item + " is missing one condition");
    }
    pair.validate();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_stimulus_file(const std::vector<StimulusPair>& pairs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write stimulus file: " + path);
  out << "item_id\ttemplate_id\tcondition\tlanguage\tsentence\ttarget_index\n";
  for (const StimulusPair& pair : pairs) {
    pair.validate();
    out << pair.item_id << '\t' << pair.template_id << "\thigh_agree\t" << pair.language << '\t'
        << join(pair.high_agree) << '\t' << pair.target_high << '\n';
    out << pair.item_id << '\t' << pair.template_id << "\tlow_agree\t" << pair.language << '\t'
        << join(pair.low_agree) << '\t' << pair.target_low << '\n';
  }
}

}  // namespace attachlab
