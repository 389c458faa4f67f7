#pragma once

// Text formats.
//
//   SETFAM n=<n> kind=<none|selective|strongly_selective> k=<k> guarantee=<flag>
//   <labels of set 1, ascending, space separated>      (empty line = empty set)
//   ...
//
//   SEQSET n=<n> r=<r> m=<m>
//   <m symbols of row 1, space separated>
//   ...

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "radiobcast/sequences.hpp"
#include "radiobcast/setfam.hpp"

namespace radiobcast::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "KEY a=1 b=x" -> {a:1, b:x}; the first token must equal `tag`.
inline std::map<std::string, std::string> parse_header(const std::string& line, const std::string& tag) {
  std::istringstream in(line);
  std::string tok;
  if (!(in >> tok) || tok != tag) throw FormatError("expected header '" + tag + "', got '" + line + "'");
  std::map<std::string, std::string> kv;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header field '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

inline const std::string& field(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("missing header field '" + key + "'");
  return it->second;
}

inline std::size_t to_size(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("not a number: '" + s + "'");
  return static_cast<std::size_t>(v);
}

inline setfam::FamilyKind parse_kind(const std::string& s) {
  if (s == "none") return setfam::FamilyKind::none;
  if (s == "selective") return setfam::FamilyKind::selective;
  if (s == "strongly_selective") return setfam::FamilyKind::strongly_selective;
  throw FormatError("unknown family kind '" + s + "'");
}

inline setfam::Guarantee parse_guarantee(const std::string& s) {
  if (s == "none") return setfam::Guarantee::none;
  if (s == "probabilistic") return setfam::Guarantee::probabilistic;
  if (s == "verified") return setfam::Guarantee::verified;
  if (s == "certified-by-construction") return setfam::Guarantee::certified_by_construction;
  throw FormatError("unknown guarantee '" + s + "'");
}

inline void write_labels(std::ostream& out, const std::vector<Label>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? " " : "") << labels[i];
  out << '\n';
}

inline void write_family(std::ostream& out, const setfam::SetFamily& fam) {
  out << "SETFAM n=" << fam.ground_size << " kind=" << to_string(fam.claim.kind) << " k=" << fam.claim.k
      << " guarantee=" << to_string(fam.claim.guarantee) << '\n';
  for (const auto& s : fam.sets) write_labels(out, s.labels());
}

inline LabelSet parse_set_line(const std::string& line, std::size_t n) {
  LabelSet s(n);
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    auto v = to_size(tok);
    if (v == 0 || v > n) throw FormatError("label " + tok + " outside [1," + std::to_string(n) + "]");
    s.insert(static_cast<Label>(v));
  }
  return s;
}

// Reads `count` set lines, or everything up to end of stream when absent.
inline setfam::SetFamily read_family(std::istream& in, std::optional<std::size_t> count = std::nullopt) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty family stream");
  auto kv = parse_header(line, "SETFAM");
  setfam::SetFamily fam;
  fam.ground_size = to_size(field(kv, "n"));
  fam.claim.kind = parse_kind(field(kv, "kind"));
  fam.claim.k = to_size(field(kv, "k"));
  fam.claim.guarantee = parse_guarantee(field(kv, "guarantee"));
  while ((!count || fam.sets.size() < *count) && std::getline(in, line)) fam.sets.push_back(parse_set_line(line, fam.ground_size));
  if (count && fam.sets.size() != *count) throw FormatError("truncated family: expected " + std::to_string(*count) + " sets");
  return fam;
}

inline void write_sequences(std::ostream& out, const setfam::SequenceSet& seqs) {
  out << "SEQSET n=" << seqs.count() << " r=" << seqs.alphabet_max() << " m=" << seqs.length() << '\n';
  for (const auto& row : seqs.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
    out << '\n';
  }
}

inline setfam::SequenceSet read_sequences(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty sequence stream");
  auto kv = parse_header(line, "SEQSET");
  std::size_t n = to_size(field(kv, "n")), r = to_size(field(kv, "r")), m = to_size(field(kv, "m"));
  std::vector<std::vector<setfam::SequenceSet::Symbol>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated sequence set");
    std::vector<setfam::SequenceSet::Symbol> row;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) row.push_back(static_cast<setfam::SequenceSet::Symbol>(to_size(tok)));
    if (row.size() != m) throw FormatError("row " + std::to_string(i + 1) + " has wrong length");
    rows.push_back(std::move(row));
  }
  try {
    return setfam::SequenceSet(r, std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

template <typename T, typename Writer>
std::string to_text(const T& value, Writer&& write) {
  std::ostringstream out;
  write(out, value);
  return out.str();
}

inline std::string to_text(const setfam::SetFamily& f) { return to_text(f, [](std::ostream& o, const auto& v) { write_family(o, v); }); }
inline std::string to_text(const setfam::SequenceSet& s) { return to_text(s, [](std::ostream& o, const auto& v) { write_sequences(o, v); }); }

}  // namespace radiobcast::io
