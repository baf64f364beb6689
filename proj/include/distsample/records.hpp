// Copyright 2026 The distsample Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "distsample/experiment.hpp"
#include "distsample/oracle.hpp"
#include "distsample/protocols.hpp"
#include "distsample/statistics.hpp"

namespace distsample {

using Record = nlohmann::ordered_json;

inline Record to_record(const Vec3& v) { return Record::array({v.x, v.y, v.z}); }

inline Record to_record(const GofVerdict& v) {
  Record r;
  r["test_name"] = v.test_name;
  r["statistic"] = v.statistic;
  r["threshold"] = v.threshold;
  r["pass"] = v.pass;
  return r;
}

inline Record to_record(const ResourceMeans& m) {
  Record r;
  r["bits_mean"] = m.bits_total;
  r["bits_a_to_b_mean"] = m.bits_a_to_b;
  r["bits_b_to_a_mean"] = m.bits_b_to_a;
  r["nlbits_mean"] = m.nlbit_uses;
  r["rounds_mean"] = m.rounds;
  r["raw_uniforms_mean"] = m.raw_uniforms;
  r["max_bits"] = m.max_bits_total;
  r["max_rounds"] = m.max_rounds;
  return r;
}

inline Record verdicts_record(const std::vector<GofVerdict>& verdicts) {
  Record arr = Record::array();
  for (const auto& v : verdicts) arr.push_back(to_record(v));
  return arr;
}

/// Common header of every summary record.
inline Record record_header(std::string_view command, std::string_view protocol,
                            std::uint64_t seed, std::uint64_t trials) {
  Record r;
  r["command"] = std::string(command);
  r["protocol"] = std::string(protocol);
  r["seed"] = seed;
  r["trials"] = trials;
  return r;
}

/// Summary of a projective-protocol run at settings (a, b).
inline Record spin_summary(std::string_view protocol, std::uint64_t seed, std::uint64_t trials,
                           const UnitVector3& a, const UnitVector3& b, const TrialStats& st,
                           double expected_correlation, const std::vector<GofVerdict>& verdicts) {
  Record r = record_header("simulate", protocol, seed, trials);
  r["settings"]["a"] = to_record(a.vec());
  r["settings"]["b"] = to_record(b.vec());
  r["settings"]["a_dot_b"] = dot(a, b);
  Record& e = r["estimates"];
  e["n_effective"] = st.n_effective;
  e["E_AB"] = st.mean;
  e["E_AB_stderr"] = st.std_error;
  e["E_A"] = st.mean_alice;
  e["E_A_stderr"] = st.std_error_alice;
  e["E_B"] = st.mean_bob;
  e["E_B_stderr"] = st.std_error_bob;
  e["abort_rate_alice"] = st.abort_rate_alice;
  e["abort_rate_bob"] = st.abort_rate_bob;
  e["abort_rate_joint"] = st.abort_rate_joint;
  r["oracle"]["E_AB"] = expected_correlation;
  r["ledger_means"] = to_record(st.resources);
  r["verdicts"] = verdicts_record(verdicts);
  return r;
}

/// Flattens nested objects/arrays into dotted keys, in document order.
inline std::vector<std::pair<std::string, Record>> flatten(const Record& r,
                                                           const std::string& prefix = "") {
  std::vector<std::pair<std::string, Record>> out;
  auto join = [&](const std::string& key) { return prefix.empty() ? key : prefix + "." + key; };
  if (r.is_object()) {
    for (const auto& [key, value] : r.items()) {
      auto sub = flatten(value, join(key));
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else if (r.is_array()) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      auto sub = flatten(r[k], join(std::to_string(k)));
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else {
    out.emplace_back(prefix, r);
  }
  return out;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

inline std::string csv_value(const Record& v) {
  return v.is_string() ? csv_field(v.get<std::string>()) : v.dump();
}

}  // namespace detail

/// One header row of flattened keys and one row of values. Numbers are
/// printed exactly as in the JSON encoding.
inline std::string to_csv(const Record& r) {
  const auto fields = flatten(r);
  std::string header;
  std::string row;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k > 0) {
      header += ',';
      row += ',';
    }
    header += detail::csv_field(fields[k].first);
    row += detail::csv_value(fields[k].second);
  }
  return header + "\n" + row + "\n";
}

enum class OutputFormat { json, csv };

inline std::string encode(const Record& r, OutputFormat format) {
  return format == OutputFormat::json ? r.dump(2) + "\n" : to_csv(r);
}

/// Parses one CSV line with RFC 4180 quoting.
inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        fields.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace distsample
