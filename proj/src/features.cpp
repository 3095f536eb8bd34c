#include "accent/features.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "accent/error.hpp"
#include "accent/text.hpp"
#include "accent/version.hpp"

namespace accent {

int Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<Eigen::Index> Dataset::class_counts() const {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(std::max(num_classes(), 0)), 0);
  for (int y : labels) {
    if (y >= 0) ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

void validate_training_set(const Dataset& data) {
  if (static_cast<Eigen::Index>(data.labels.size()) != data.size()) {
    throw DimensionError("dataset has " + std::to_string(data.size()) + " points but " +
                         std::to_string(data.labels.size()) + " labels");
  }
  if (data.size() < 2) throw InvalidArgument("dataset needs at least two points");
  if (data.dim() < 1) throw InvalidArgument("dataset has zero feature columns");
  if (!data.points.allFinite()) throw InvalidArgument("dataset contains non-finite values");
  for (int y : data.labels) {
    if (y < 0) throw InvalidArgument("negative class label " + std::to_string(y));
  }
  const auto counts = data.class_counts();
  if (counts.size() < 2) throw InvalidArgument("training data needs at least two classes");
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) throw InvalidArgument("class " + std::to_string(k) + " has no points");
  }
}

Dataset subset(const Dataset& data, std::span<const Eigen::Index> rows) {
  Dataset out;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.labels.reserve(rows.size());
  const bool with_ids = !data.ids.empty();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    out.points.row(static_cast<Eigen::Index>(i)) = data.points.row(r);
    out.labels.push_back(data.labels[static_cast<std::size_t>(r)]);
    if (with_ids) out.ids.push_back(data.ids[static_cast<std::size_t>(r)]);
  }
  return out;
}

Dataset truncate_features(const Dataset& data, Eigen::Index q) {
  if (q < 1 || q > data.dim()) {
    throw DimensionError("cannot keep " + std::to_string(q) + " of " + std::to_string(data.dim()) +
                         " feature columns");
  }
  Dataset out = data;
  out.points = data.points.leftCols(q);
  return out;
}

Dataset to_dataset(const std::vector<FeatureVector>& rows) {
  Dataset out;
  if (rows.empty()) return out;
  const Eigen::Index p = rows.front().values.size();
  out.points.resize(static_cast<Eigen::Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.values.size() != p) throw DimensionError("feature rows have differing widths");
    if (!r.label) throw InvalidArgument("feature row '" + r.source_id + "' has no label");
    out.points.row(static_cast<Eigen::Index>(i)) = r.values.transpose();
    out.labels.push_back(*r.label);
    out.ids.push_back(r.source_id);
  }
  return out;
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "# feature_format=" << kFeatureFormatVersion << '\n';
  for (const auto& [key, value] : table.metadata) out << "# " << key << '=' << value << '\n';
  const Eigen::Index q = table.rows.empty() ? 0 : table.rows.front().values.size();
  out << "source_id,label";
  for (Eigen::Index j = 0; j < q; ++j) out << ",c" << (j + table.first_coeff);
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.values.size() != q) throw DimensionError("feature rows have differing widths");
    if (row.source_id.find(',') != std::string::npos) {
      throw InvalidArgument("source id '" + row.source_id + "' contains a comma");
    }
    out << row.source_id << ',';
    if (row.label) out << *row.label;
    for (Eigen::Index j = 0; j < q; ++j) out << ',' << format_double17(row.values[j]);
    out << '\n';
  }
}

void save_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
  std::ostringstream buffer;
  write_feature_csv(buffer, table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create '" + path.string() + "'");
  out << buffer.str();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

FeatureTable read_feature_csv(std::istream& in) {
  FeatureTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (key == "feature_format") {
          if (parse_int(value, key) != kFeatureFormatVersion) {
            throw FormatError("unsupported feature format version " + value);
          }
        } else {
          table.metadata.emplace_back(key, value);
        }
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.size() < 3 || fields[0] != "source_id" || fields[1] != "label") {
        throw FormatError("feature CSV line " + std::to_string(line_no) +
                          ": expected header 'source_id,label,c...'");
      }
      table.first_coeff = fields[2] == "c0" ? 0 : fields[2] == "c1" ? 1 : -1;
      if (table.first_coeff < 0) {
        throw FormatError("feature CSV: first coefficient column must be c0 or c1");
      }
      for (std::size_t j = 2; j < fields.size(); ++j) {
        if (fields[j] != "c" + std::to_string(j - 2 + static_cast<std::size_t>(table.first_coeff))) {
          throw FormatError("feature CSV: unexpected column '" + fields[j] + "'");
        }
      }
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      throw FormatError("feature CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    FeatureVector row;
    row.source_id = fields[0];
    if (!fields[1].empty()) row.label = parse_int(fields[1], "label");
    row.values.resize(static_cast<Eigen::Index>(width - 2));
    for (std::size_t j = 2; j < width; ++j) {
      row.values[static_cast<Eigen::Index>(j - 2)] = parse_double(fields[j], "feature value");
    }
    if (!row.values.allFinite()) {
      throw FormatError("feature CSV line " + std::to_string(line_no) + ": non-finite value");
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw FormatError("feature CSV has no header line");
  return table;
}

FeatureTable load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_feature_csv(in);
}

}  // namespace accent
