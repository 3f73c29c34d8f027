#include "mer/selection/feature_matrix.hpp"

#include "mer/util/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

namespace mer::selection {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::audio:
      return "audio";
    case Modality::sentiment:
      return "sentiment";
    case Modality::tfidf:
      return "tfidf";
    case Modality::xanew:
      return "xanew";
  }
  return "?";
}

Modality parse_modality(std::string_view name) {
  for (Modality m : {Modality::audio, Modality::sentiment, Modality::tfidf, Modality::xanew})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown feature modality '" + std::string(name) + "'");
}

void FeatureMatrix::validate() const {
  if (static_cast<Index>(names.size()) != cols() || static_cast<Index>(tags.size()) != cols()) {
    throw DimensionMismatch("feature matrix: names/tags do not match the column count");
  }
  if (static_cast<Index>(row_ids.size()) != rows()) throw DimensionMismatch("feature matrix: row id count mismatch");
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw InvalidArgument("feature matrix: duplicate column '" + n + "'");
  if (!values.allFinite()) throw InvalidArgument("feature matrix: values must be finite");
}

Index FeatureMatrix::column(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return static_cast<Index>(j);
  return -1;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> columns) const {
  FeatureMatrix out;
  out.row_ids = row_ids;
  out.values.resize(rows(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const Index j = column(columns[k]);
    if (j < 0) throw InvalidArgument("feature matrix has no column '" + columns[k] + "'");
    out.values.col(static_cast<Index>(k)) = values.col(j);
    out.names.push_back(names[static_cast<std::size_t>(j)]);
    out.tags.push_back(tags[static_cast<std::size_t>(j)]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const Index> rows_to_keep) const {
  FeatureMatrix out;
  out.names = names;
  out.tags = tags;
  out.values.resize(static_cast<Index>(rows_to_keep.size()), cols());
  for (std::size_t k = 0; k < rows_to_keep.size(); ++k) {
    const Index i = rows_to_keep[k];
    if (i < 0 || i >= rows()) throw InvalidArgument("feature matrix row index out of range");
    out.values.row(static_cast<Index>(k)) = values.row(i);
    out.row_ids.push_back(row_ids[static_cast<std::size_t>(i)]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::with_modalities(std::initializer_list<Modality> keep) const {
  std::vector<std::string> cols;
  for (std::size_t j = 0; j < names.size(); ++j)
    if (std::find(keep.begin(), keep.end(), tags[j]) != keep.end()) cols.push_back(names[j]);
  return select_columns(cols);
}

FeatureMatrix fuse(std::span<const FeatureMatrix> parts) {
  if (parts.empty()) throw InvalidArgument("fuse: no parts");
  Index d = 0;
  for (const auto& p : parts) {
    if (p.row_ids != parts[0].row_ids) throw InvalidArgument("fuse: parts do not share the same rows in the same order");
    d += p.cols();
  }
  FeatureMatrix out;
  out.row_ids = parts[0].row_ids;
  out.values.resize(parts[0].rows(), d);
  Index at = 0;
  for (const auto& p : parts) {
    out.values.middleCols(at, p.cols()) = p.values;
    at += p.cols();
    out.names.insert(out.names.end(), p.names.begin(), p.names.end());
    out.tags.insert(out.tags.end(), p.tags.begin(), p.tags.end());
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& n : out.names)
    if (!seen.insert(n).second) throw InvalidArgument("fuse: column '" + n + "' appears in more than one part");
  return out;
}

FeatureMatrix fuse(std::initializer_list<FeatureMatrix> parts) {
  return fuse(std::span<const FeatureMatrix>(parts.begin(), parts.size()));
}

std::string to_csv(const FeatureMatrix& m) {
  std::string out = "song_id";
  for (std::size_t j = 0; j < m.names.size(); ++j) {
    out += ',';
    out += csv_escape(std::string(to_string(m.tags[j])) + "/" + m.names[j]);
  }
  out += '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    out += csv_escape(m.row_ids[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < m.cols(); ++j) {
      out += ',';
      out += format_double(m.values(i, j));
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix parse_feature_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw IngestError("feature file is empty");
  const auto& header = rows[0].fields;
  if (header.empty() || header[0] != "song_id") throw IngestError("feature file header must start with song_id");
  FeatureMatrix m;
  for (std::size_t j = 1; j < header.size(); ++j) {
    const auto slash = header[j].find('/');
    if (slash == std::string::npos) throw IngestError("feature column '" + header[j] + "' lacks a modality prefix");
    m.tags.push_back(parse_modality(std::string_view(header[j]).substr(0, slash)));
    m.names.push_back(header[j].substr(slash + 1));
  }
  const auto d = static_cast<Index>(m.names.size());
  m.values.resize(static_cast<Index>(rows.size() - 1), d);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (static_cast<Index>(f.size()) != d + 1) {
      throw IngestError("feature file line " + std::to_string(rows[r].line) + ": wrong field count");
    }
    m.row_ids.push_back(f[0]);
    for (Index j = 0; j < d; ++j) {
      const auto& s = f[static_cast<std::size_t>(j + 1)];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IngestError("feature file line " + std::to_string(rows[r].line) + ": bad number '" + s + "'");
      }
      m.values(static_cast<Index>(r - 1), j) = v;
    }
  }
  m.validate();
  return m;
}

void save_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m) { write_file_atomic(path, to_csv(m)); }

FeatureMatrix load_feature_csv(const std::filesystem::path& path) { return parse_feature_csv(read_text_file(path)); }

}  // namespace mer::selection
