#include "attachlab/eval.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "attachlab/errors.hpp"

namespace attachlab::eval {

const char* coding_name(Coding coding) {
  switch (coding) {
    case Coding::Low: return "LOW";
    case Coding::High: return "HIGH";
    case Coding::Tie: return "TIE";
  }
  return "?";
}

namespace {

IdSentence encode_with_warning(const Vocab& vocab, const std::vector<std::string>& tokens,
                               const OovWarner& warn) {
  IdSentence ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) {
    const auto id = vocab.id_of(tok);
    if (id == vocab.unk_id() && tok != kUnkToken && warn) warn(tok);
    ids.push_back(id);
  }
  return ids;
}

void check_vocab(const lm::Checkpoint& checkpoint, const Vocab& vocab) {
  if (checkpoint.vocab_hash != vocab.hash()) {
    throw DataError("checkpoint was trained against a different vocabulary (hash mismatch)");
  }
}

}  // namespace

SurprisalRecord sequence_surprisal(const lm::Checkpoint& checkpoint, const Vocab& vocab,
                                   const std::vector<std::string>& tokens,
                                   const std::string& sentence_id, std::size_t target_index,
                                   const OovWarner& warn) {
  if (tokens.empty()) throw ConfigError("sequence_surprisal: empty sentence");
  check_vocab(checkpoint, vocab);
  SurprisalRecord record;
  record.sentence_id = sentence_id;
  record.surprisals = lm::sequence_surprisal(checkpoint, encode_with_warning(vocab, tokens, warn));
  if (target_index != SIZE_MAX) {
    if (target_index >= record.surprisals.size()) {
      throw DataError("sequence_surprisal: target index out of range");
    }
    record.target_surprisal = record.surprisals[target_index];
  }
  return record;
}

DeltaRecord attachment_delta(const lm::Checkpoint& checkpoint, const Vocab& vocab,
                             const StimulusPair& pair, const OovWarner& warn) {
  pair.validate();
  check_vocab(checkpoint, vocab);

  const auto s_high =
      lm::sequence_surprisal(checkpoint, encode_with_warning(vocab, pair.high_agree, warn));
  const auto s_low =
      lm::sequence_surprisal(checkpoint, encode_with_warning(vocab, pair.low_agree, warn));

  DeltaRecord record;
  record.pair_id = pair.item_id;
  record.template_id = pair.template_id;
  record.language = pair.language;
  record.surprisal_high_agree = s_high[pair.target_high];
  record.surprisal_low_agree = s_low[pair.target_low];
  record.delta = record.surprisal_high_agree - record.surprisal_low_agree;
  record.coding =
      record.delta > 0.0 ? Coding::Low : (record.delta < 0.0 ? Coding::High : Coding::Tie);
  return record;
}

AggregateReport aggregate_report(const std::vector<DeltaRecord>& deltas) {
  if (deltas.empty()) throw ConfigError("aggregate_report: no delta records");
  AggregateReport report;
  report.n = deltas.size();
  double sum = 0.0;
  for (const auto& d : deltas) {
    sum += d.delta;
    switch (d.coding) {
      case Coding::Low: ++report.low_count; break;
      case Coding::High: ++report.high_count; break;
      case Coding::Tie: ++report.tie_count; break;
    }
  }
  report.mean_delta = sum / double(report.n);
  const std::size_t decided = report.low_count + report.high_count;
  if (decided > 0) {
    report.proportion_low = double(report.low_count) / double(decided);
    report.proportion_high = double(report.high_count) / double(decided);
  }
  return report;
}

void write_results_csv(const std::vector<DeltaRecord>& deltas, std::uint64_t seed,
                       const std::string& path, bool append) {
  std::ofstream out(path, append ? std::ios::app | std::ios::binary : std::ios::binary);
  if (!out) throw DataError("cannot write results CSV: " + path);
  if (!append) {
    out << "pair_id,template_id,language,seed,surprisal_high_agree,surprisal_low_agree,"
           "delta_nats,coding\n";
  }
  out << std::setprecision(17);
  for (const auto& d : deltas) {
    out << d.pair_id << ',' << d.template_id << ',' << d.language << ',' << seed << ','
        << d.surprisal_high_agree << ',' << d.surprisal_low_agree << ',' << d.delta << ','
        << coding_name(d.coding) << '\n';
  }
}

std::vector<DeltaRecord> read_results_csv(const std::string& path,
                                          std::vector<std::uint64_t>* seeds) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results CSV: " + path);
  std::vector<DeltaRecord> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw DataError(path + ": malformed results row");
    DeltaRecord d;
    d.pair_id = fields[0];
    d.template_id = fields[1];
    d.language = fields[2];
    d.surprisal_high_agree = std::stod(fields[4]);
    d.surprisal_low_agree = std::stod(fields[5]);
    d.delta = std::stod(fields[6]);
    if (fields[7] == "LOW") {
      d.coding = Coding::Low;
    } else if (fields[7] == "HIGH") {
      d.coding = Coding::High;
    } else if (fields[7] == "TIE") {
      d.coding = Coding::Tie;
    } else {
      throw DataError(path + ": unknown coding '" + fields[7] + "'");
    }
    if (seeds) seeds->push_back(std::stoull(fields[3]));
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace attachlab::eval
