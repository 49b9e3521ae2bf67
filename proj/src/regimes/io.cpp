/*
 Copyright 2026 The regimes Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "regimes/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "regimes/error.hpp"

namespace regimes::io {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  // Trailing blank lines carry no rows.
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
  return lines;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote in CSV record");
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  return out + "\"";
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

double parse_real(const std::string& s, std::size_t row, const std::string& column) {
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty value in row " + std::to_string(row));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw Error(ErrorCode::ParseError,
                "'" + s + "' is not a number (row " + std::to_string(row) + ", column " + column + ")");
  if (!std::isfinite(v))
    throw Error(ErrorCode::NonFiniteValue,
                "non-finite value in row " + std::to_string(row) + ", column " + column);
  return v;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json vec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json mat_json(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

ordered_json imat_json(const Eigen::MatrixXi& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    a.push_back(r);
  }
  return a;
}

double finite(const json& j) {
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite number in JSON");
  return v;
}

Eigen::VectorXd json_vec(const json& j) {
  Eigen::VectorXd v(Eigen::Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[Eigen::Index(i)] = finite(j[i]);
  return v;
}

Eigen::MatrixXd json_mat(const json& j) {
  const std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw Error(ErrorCode::ParseError, "ragged matrix in JSON");
    for (std::size_t k = 0; k < cols; ++k) m(Eigen::Index(i), Eigen::Index(k)) = finite(j[i][k]);
  }
  return m;
}

Eigen::MatrixXi json_imat(const json& j) {
  const std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
  Eigen::MatrixXi m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m(Eigen::Index(i), Eigen::Index(k)) = j[i][k].get<int>();
  return m;
}

ordered_json channels_json(ChannelSet cs) {
  ordered_json a = ordered_json::array();
  for (auto m : cs.modalities()) a.push_back(std::string(modality_tag(m)));
  return a;
}

ChannelSet json_channels(const json& j) {
  ChannelSet cs;
  for (const auto& tag : j) {
    const auto m = modality_from_tag(tag.get<std::string>());
    if (!m) throw Error(ErrorCode::ParseError, "unknown modality '" + tag.get<std::string>() + "'");
    cs.insert(*m);
  }
  if (cs.empty()) throw Error(ErrorCode::ParseError, "model lists no channels");
  return cs;
}

ordered_json emissions_json(const std::vector<std::vector<GaussianEmission>>& em, ChannelSet cs) {
  const auto ms = cs.modalities();
  ordered_json a = ordered_json::array();
  for (const auto& state : em) {
    ordered_json s;
    for (std::size_t c = 0; c < ms.size(); ++c)
      s[std::string(modality_tag(ms[c]))] = {{"mean", vec_json(state[c].mean())},
                                             {"covariance", mat_json(state[c].covariance())}};
    a.push_back(s);
  }
  return a;
}

std::vector<std::vector<GaussianEmission>> json_emissions(const json& j, ChannelSet cs) {
  const auto ms = cs.modalities();
  std::vector<std::vector<GaussianEmission>> out;
  for (const auto& state : j) {
    std::vector<GaussianEmission> row;
    for (auto m : ms) {
      const auto& e = state.at(std::string(modality_tag(m)));
      const Eigen::VectorXd mu = json_vec(e.at("mean"));
      const Eigen::MatrixXd cov = json_mat(e.at("covariance"));
      if (mu.size() != 2 || cov.rows() != 2 || cov.cols() != 2)
        throw Error(ErrorCode::ParseError, "emissions must be 2-dimensional");
      row.emplace_back(Vec2(mu), Mat2(cov));
    }
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json hypers_json(const StickyHypers& h) {
  return {{"alpha", h.alpha}, {"kappa", h.kappa}, {"gamma", h.gamma}};
}

StickyHypers json_hypers(const json& j) {
  return {finite(j.at("alpha")), finite(j.at("kappa")), finite(j.at("gamma"))};
}

ordered_json sample_json(const SamplerState& s) {
  ordered_json j;
  j["z"] = s.z;
  j["beta"] = vec_json(s.beta);
  j["initial"] = vec_json(s.initial);
  j["transitions"] = mat_json(s.pi);
  j["emissions"] = emissions_json(s.emissions, s.channels);
  j["hypers"] = hypers_json(s.hypers);
  j["tables"] = imat_json(s.tables);
  std::vector<int> w(s.overrides.data(), s.overrides.data() + s.overrides.size());
  j["overrides"] = w;
  return j;
}

SamplerState json_sample(const json& j, ChannelSet cs) {
  SamplerState s;
  s.channels = cs;
  s.z = j.at("z").get<std::vector<int>>();
  s.beta = json_vec(j.at("beta"));
  s.initial = json_vec(j.at("initial"));
  s.pi = json_mat(j.at("transitions"));
  s.emissions = json_emissions(j.at("emissions"), cs);
  s.hypers = json_hypers(j.at("hypers"));
  s.tables = json_imat(j.at("tables"));
  const auto w = j.at("overrides").get<std::vector<int>>();
  s.overrides = Eigen::Map<const Eigen::VectorXi>(w.data(), Eigen::Index(w.size()));
  return s;
}

void put_count(ordered_json& j, const char* key, double v) {
  if (std::floor(v) == v && std::abs(v) < 9.0e15)
    j[key] = static_cast<long long>(v);
  else
    j[key] = v;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

SeriesFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? SeriesFormat::Json : SeriesFormat::Csv;
}

std::optional<SeriesFormat> parse_format(std::string_view name) {
  if (name == "csv") return SeriesFormat::Csv;
  if (name == "json") return SeriesFormat::Json;
  return std::nullopt;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

ConversationSeries parse_series_csv(std::string_view text, std::string id) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "series file is empty");
  const auto header = split_csv(lines[0]);
  if (header.empty() || header[0] != "t")
    throw Error(ErrorCode::ParseError, "header must start with column 't'");
  // column index of valence / arousal per modality
  std::map<Modality, std::pair<int, int>> cols;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto& h = header[i];
    const auto us = h.find('_');
    const auto m = us == std::string::npos ? std::nullopt : modality_from_tag(h.substr(us + 1));
    const auto kind = us == std::string::npos ? std::string() : h.substr(0, us);
    if (!m || (kind != "v" && kind != "a"))
      throw Error(ErrorCode::ParseError, "unknown column '" + h + "'");
    auto& slot = cols.try_emplace(*m, -1, -1).first->second;
    int& target = kind == "v" ? slot.first : slot.second;
    if (target != -1) throw Error(ErrorCode::ParseError, "duplicate column '" + h + "'");
    target = int(i);
  }
  if (cols.empty()) throw Error(ErrorCode::ParseError, "no valence/arousal columns");
  for (const auto& [m, vc] : cols)
    if (vc.first < 0 || vc.second < 0)
      throw Error(ErrorCode::ParseError,
                  "modality " + std::string(modality_tag(m)) + " needs both v_ and a_ columns");

  std::vector<Observation> obs;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv(lines[r]);
    const std::size_t row = r - 1;
    const auto t = parse_int(fields[0]);
    if (!t) throw Error(ErrorCode::ParseError, "bad index '" + fields[0] + "' in row " + std::to_string(row));
    if (*t != static_cast<long long>(row))
      throw Error(ErrorCode::NonContiguousIndex,
                  "expected t=" + std::to_string(row) + ", found t=" + std::to_string(*t));
    Observation o;
    for (const auto& [m, vc] : cols) {
      const bool has_v = std::size_t(vc.first) < fields.size() && !fields[std::size_t(vc.first)].empty();
      const bool has_a = std::size_t(vc.second) < fields.size() && !fields[std::size_t(vc.second)].empty();
      if (!has_v || !has_a)
        throw Error(ErrorCode::InconsistentChannels,
                    "row " + std::to_string(row) + " is missing the " +
                        std::string(modality_tag(m)) + " pair");
      o.set(m, {parse_real(fields[std::size_t(vc.first)], row, header[std::size_t(vc.first)]),
                parse_real(fields[std::size_t(vc.second)], row, header[std::size_t(vc.second)])});
    }
    if (fields.size() > header.size())
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has extra fields");
    obs.push_back(o);
  }
  if (obs.empty()) throw Error(ErrorCode::ParseError, "series file has no rows");
  return ConversationSeries(std::move(id), std::move(obs));
}

ConversationSeries parse_series_json(std::string_view text, std::string id) {
  const json doc = parse_json(text);
  if (!doc.is_array() || doc.empty()) throw Error(ErrorCode::ParseError, "series JSON must be a non-empty array");
  std::vector<Observation> obs;
  ChannelSet expected;
  try {
    for (std::size_t row = 0; row < doc.size(); ++row) {
      const auto& item = doc[row];
      if (!item.is_object()) throw Error(ErrorCode::ParseError, "series entries must be objects");
      const long long t = item.at("t").get<long long>();
      if (t != static_cast<long long>(row))
        throw Error(ErrorCode::NonContiguousIndex,
                    "expected t=" + std::to_string(row) + ", found t=" + std::to_string(t));
      Observation o;
      for (auto m : kAllModalities) {
        const std::string tag(modality_tag(m));
        if (!item.contains(tag) || item[tag].is_null()) continue;
        const auto& p = item[tag];
        if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ParseError, tag + " must be [v, a]");
        o.set(m, {finite(p[0]), finite(p[1])});
      }
      for (const auto& [key, _] : item.items())
        if (key != "t" && !modality_from_tag(key))
          throw Error(ErrorCode::ParseError, "unknown key '" + key + "'");
      if (row == 0) expected = o.channels();
      if (o.channels().empty() || !(o.channels() == expected))
        throw Error(ErrorCode::InconsistentChannels,
                    "entry " + std::to_string(row) + " has channels " + o.channels().to_string() +
                        ", expected " + expected.to_string());
      obs.push_back(o);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return ConversationSeries(std::move(id), std::move(obs));
}

ConversationSeries read_series(const std::filesystem::path& path, std::optional<SeriesFormat> format) {
  const auto text = read_text(path);
  const auto id = path.stem().string();
  return format.value_or(format_for(path)) == SeriesFormat::Json ? parse_series_json(text, id)
                                                                  : parse_series_csv(text, id);
}

std::string format_series_csv(const ConversationSeries& series) {
  const auto ms = series.channels().modalities();
  std::string out = "t";
  for (auto m : ms) {
    const std::string tag(modality_tag(m));
    out += ",v_" + tag + ",a_" + tag;
  }
  out += "\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out += std::to_string(t);
    for (auto m : ms) {
      const auto& p = series[t].at(m);
      out += "," + format_real(p.valence) + "," + format_real(p.arousal);
    }
    out += "\n";
  }
  return out;
}

std::string format_series_json(const ConversationSeries& series) {
  ordered_json doc = ordered_json::array();
  for (std::size_t t = 0; t < series.size(); ++t) {
    ordered_json item;
    item["t"] = t;
    for (auto m : series.channels().modalities()) {
      const auto& p = series[t].at(m);
      item[std::string(modality_tag(m))] = {p.valence, p.arousal};
    }
    doc.push_back(item);
  }
  return doc.dump(1) + "\n";
}

void write_series(const ConversationSeries& series, const std::filesystem::path& path,
                  std::optional<SeriesFormat> format) {
  write_text(path, format.value_or(format_for(path)) == SeriesFormat::Json ? format_series_json(series)
                                                                           : format_series_csv(series));
}

LabelSequence parse_labels_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "label file is empty");
  const auto header = split_csv(lines[0]);
  if (header.size() < 2 || header[0] != "t" || header[1] != "label")
    throw Error(ErrorCode::ParseError, "label header must be 't,label'");
  const bool has_names = header.size() >= 3 && header[2] == "name";
  std::vector<std::string> raw;
  std::vector<std::string> names_col;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv(lines[r]);
    const std::size_t row = r - 1;
    if (fields.size() < 2 || fields[1].empty())
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has no label");
    const auto t = parse_int(fields[0]);
    if (!t) throw Error(ErrorCode::ParseError, "bad index '" + fields[0] + "'");
    if (*t != static_cast<long long>(row))
      throw Error(ErrorCode::NonContiguousIndex,
                  "expected t=" + std::to_string(row) + ", found t=" + std::to_string(*t));
    raw.push_back(fields[1]);
    if (has_names) names_col.push_back(fields.size() > 2 ? fields[2] : std::string());
  }
  if (raw.empty()) throw Error(ErrorCode::ParseError, "label file has no rows");

  LabelSequence out;
  const bool all_int = std::all_of(raw.begin(), raw.end(), [](const std::string& s) {
    const auto v = parse_int(s);
    return v && *v >= 0;
  });
  if (all_int) {
    std::set<long long> values;
    for (const auto& s : raw) values.insert(*parse_int(s));
    std::map<long long, int> dense;
    for (long long v : values) {
      dense[v] = int(dense.size());
      out.names.push_back(std::to_string(v));
    }
    for (const auto& s : raw) out.labels.push_back(dense[*parse_int(s)]);
    if (has_names)
      for (std::size_t t = 0; t < raw.size(); ++t)
        if (!names_col[t].empty()) out.names[std::size_t(out.labels[t])] = names_col[t];
  } else {
    std::map<std::string, int> interned;
    for (const auto& s : raw) {
      auto [it, fresh] = interned.try_emplace(s, int(interned.size()));
      if (fresh) out.names.push_back(s);
      out.labels.push_back(it->second);
    }
  }
  return out;
}

LabelSequence read_labels(const std::filesystem::path& path) { return parse_labels_csv(read_text(path)); }

std::string format_labels_csv(const LabelSequence& labels) {
  const bool names = !labels.names.empty();
  std::string out = names ? "t,label,name\n" : "t,label\n";
  for (std::size_t t = 0; t < labels.size(); ++t) {
    out += std::to_string(t) + "," + std::to_string(labels[t]);
    if (names) {
      const auto l = std::size_t(labels[t]);
      out += "," + csv_field(l < labels.names.size() ? labels.names[l] : std::string());
    }
    out += "\n";
  }
  return out;
}

void write_labels(const LabelSequence& labels, const std::filesystem::path& path) {
  write_text(path, format_labels_csv(labels));
}

std::string model_to_json(const HmmModel& model) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "gaussian_hmm";
  j["channels"] = channels_json(model.channels);
  j["num_states"] = model.num_states();
  j["tied_covariance"] = model.tied_covariance;
  j["initial"] = vec_json(model.initial);
  j["transitions"] = mat_json(model.transitions);
  j["emissions"] = emissions_json(model.emissions, model.channels);
  return j.dump(2) + "\n";
}

std::string model_to_json(const StickyPosterior& p, bool include_samples) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "sticky_posterior";
  j["channels"] = channels_json(p.channels);
  j["k_max"] = p.k_max();
  j["effective_k"] = p.effective_k;
  j["initial"] = vec_json(p.initial);
  j["beta"] = vec_json(p.beta);
  j["transitions"] = mat_json(p.transitions);
  j["emissions"] = emissions_json(p.emissions, p.channels);
  j["hypers"] = hypers_json(p.mean_hypers);
  j["support"] = p.support;
  j["labels"] = p.labels.labels;
  j["path_log_prob"] = p.path_log_prob;
  j["loglik_trace"] = p.loglik_trace;
  j["num_samples"] = p.samples.size();
  if (include_samples) {
    ordered_json s = ordered_json::array();
    for (const auto& sample : p.samples) s.push_back(sample_json(sample));
    j["samples"] = s;
  }
  return j.dump(2) + "\n";
}

FittedModel model_from_json(std::string_view text) {
  const json j = parse_json(text);
  try {
    if (!j.is_object() || !j.contains("format_version"))
      throw Error(ErrorCode::ParseError, "model file has no format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                  " is not supported (expected " +
                                                  std::to_string(kFormatVersion) + ")");
    const auto kind = j.at("kind").get<std::string>();
    const ChannelSet cs = json_channels(j.at("channels"));
    if (kind == "gaussian_hmm") {
      HmmModel m;
      m.channels = cs;
      m.tied_covariance = j.at("tied_covariance").get<bool>();
      m.initial = json_vec(j.at("initial"));
      m.transitions = json_mat(j.at("transitions"));
      m.emissions = json_emissions(j.at("emissions"), cs);
      m.validate();
      return m;
    }
    if (kind == "sticky_posterior") {
      StickyPosterior p;
      p.channels = cs;
      p.effective_k = j.at("effective_k").get<int>();
      p.initial = json_vec(j.at("initial"));
      p.beta = json_vec(j.at("beta"));
      p.transitions = json_mat(j.at("transitions"));
      p.emissions = json_emissions(j.at("emissions"), cs);
      p.mean_hypers = json_hypers(j.at("hypers"));
      p.support = j.at("support").get<std::vector<bool>>();
      p.labels = LabelSequence(j.at("labels").get<std::vector<int>>());
      p.path_log_prob = finite(j.at("path_log_prob"));
      p.loglik_trace = j.at("loglik_trace").get<std::vector<double>>();
      if (j.contains("samples"))
        for (const auto& s : j.at("samples")) p.samples.push_back(json_sample(s, cs));
      const auto K = p.initial.size();
      if (K != j.at("k_max").get<Eigen::Index>() || p.beta.size() != K ||
          p.transitions.rows() != K || p.transitions.cols() != K ||
          p.emissions.size() != std::size_t(K) || p.support.size() != std::size_t(K))
        throw Error(ErrorCode::ParseError, "posterior arrays disagree with k_max");
      p.mean_model().validate();
      return p;
    }
    throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void write_model(const FittedModel& model, const std::filesystem::path& path, bool include_samples) {
  write_text(path, std::visit(
                       [&](const auto& m) -> std::string {
                         if constexpr (std::is_same_v<std::decay_t<decltype(m)>, HmmModel>)
                           return model_to_json(m);
                         else
                           return model_to_json(m, include_samples);
                       },
                       model));
}

FittedModel read_model(const std::filesystem::path& path) { return model_from_json(read_text(path)); }

std::string report_to_json(const MetricReport& r) {
  ordered_json j;
  if (r.segment_f1) j["segment_f1"] = *r.segment_f1;
  if (r.boundary_f1) j["boundary_f1"] = *r.boundary_f1;
  if (r.nmi) j["nmi"] = *r.nmi;
  j["mean_regime_duration"] = r.mean_regime_duration;
  j["single_utterance_fraction"] = r.single_utterance_fraction;
  put_count(j, "regime_shifts", r.regime_shifts);
  if (r.temporal_purity) j["temporal_purity"] = *r.temporal_purity;
  j["transition_entropy"] = r.transition_entropy;
  j["intra_regime_variance"] = r.intra_regime_variance;
  j["inter_regime_centroid_distance"] = r.inter_regime_centroid_distance;
  put_count(j, "effective_regimes", r.effective_regimes);
  j["dominant_regime_share"] = r.dominant_regime_share;
  return j.dump();
}

MetricReport report_from_json(std::string_view text) {
  const json j = parse_json(text);
  try {
    MetricReport r;
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key)) return std::nullopt;
      return finite(j.at(key));
    };
    r.segment_f1 = opt("segment_f1");
    r.boundary_f1 = opt("boundary_f1");
    r.nmi = opt("nmi");
    r.temporal_purity = opt("temporal_purity");
    r.mean_regime_duration = finite(j.at("mean_regime_duration"));
    r.single_utterance_fraction = finite(j.at("single_utterance_fraction"));
    r.regime_shifts = finite(j.at("regime_shifts"));
    r.transition_entropy = finite(j.at("transition_entropy"));
    r.intra_regime_variance = finite(j.at("intra_regime_variance"));
    r.inter_regime_centroid_distance = finite(j.at("inter_regime_centroid_distance"));
    r.effective_regimes = finite(j.at("effective_regimes"));
    r.dominant_regime_share = finite(j.at("dominant_regime_share"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

CorpusManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text);
  try {
    CorpusManifest m;
    const auto scope = j.value("standardization", std::string("per_conversation"));
    if (scope == "per_conversation") m.scope = StandardizationScope::PerConversation;
    else if (scope == "corpus") m.scope = StandardizationScope::Corpus;
    else throw Error(ErrorCode::ParseError, "unknown standardization scope '" + scope + "'");
    std::set<std::string> ids;
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      if (path.is_relative()) path = base_dir / path;
      if (!std::filesystem::exists(path))
        throw Error(ErrorCode::IoError, "manifest references missing file '" + path.string() + "'");
      return path;
    };
    for (const auto& c : j.at("conversations")) {
      ManifestEntry e;
      e.id = c.at("id").get<std::string>();
      if (!ids.insert(e.id).second) throw Error(ErrorCode::ParseError, "duplicate conversation id '" + e.id + "'");
      e.series = resolve(c.at("series").get<std::string>());
      if (c.contains("labels") && !c.at("labels").is_null()) e.labels = resolve(c.at("labels").get<std::string>());
      m.conversations.push_back(std::move(e));
    }
    if (m.conversations.empty()) throw Error(ErrorCode::ParseError, "manifest lists no conversations");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.parent_path());
}

std::string format_manifest(const CorpusManifest& manifest) {
  ordered_json j;
  j["standardization"] =
      manifest.scope == StandardizationScope::Corpus ? "corpus" : "per_conversation";
  ordered_json list = ordered_json::array();
  for (const auto& e : manifest.conversations) {
    ordered_json c;
    c["id"] = e.id;
    c["series"] = e.series.generic_string();
    if (e.labels) c["labels"] = e.labels->generic_string();
    list.push_back(c);
  }
  j["conversations"] = list;
  return j.dump(2) + "\n";
}

}  // namespace regimes::io
