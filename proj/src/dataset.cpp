#include "lucon/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "lucon/error.hpp"
#include "lucon/rng.hpp"
#include "text_io.hpp"

namespace lucon {

namespace {

constexpr char kMagic[4] = {'C', 'P', 'T', 'S'};
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[offset + b]) << (8 * b);
  return v;
}

}  // namespace

PointSet::PointSet(std::size_t count, std::size_t dim, std::vector<float> coords)
    : count_(count), dim_(dim), coords_(std::move(coords)) {
  if (count_ == 0 || dim_ == 0) throw FormatError("point set must have m >= 1 and n >= 1");
  if (coords_.size() != count_ * dim_)
    throw FormatError("point set holds " + std::to_string(coords_.size()) + " values, expected " +
                      std::to_string(count_ * dim_));
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i]))
      throw FormatError("non-finite coordinate at row " + std::to_string(i / dim_));
  }
}

SoftLabelSet::SoftLabelSet(std::size_t num_classes, std::vector<double> dist)
    : num_classes_(num_classes), dist_(std::move(dist)) {
  if (num_classes_ == 0) throw FormatError("soft labels need at least one class");
  if (dist_.size() % num_classes_ != 0)
    throw FormatError("soft-label matrix is not a whole number of rows");
  const std::size_t rows = dist_.size() / num_classes_;
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = dist_.data() + i * num_classes_;
    double sum = 0.0;
    for (std::size_t j = 0; j < num_classes_; ++j) {
      if (!std::isfinite(row[j]) || row[j] < 0.0 || row[j] > 1.0)
        throw FormatError("soft-label row " + std::to_string(i) + " has an entry outside [0,1]");
      sum += row[j];
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw FormatError("soft-label row " + std::to_string(i) + " sums to " +
                        detail::format_g(sum, 17) + ", not 1");
    if (sum != 1.0)
      for (std::size_t j = 0; j < num_classes_; ++j) row[j] /= sum;
  }
}

void validate(const Dataset& d) {
  const std::size_t m = d.points.count();
  if (d.labels.size() != m)
    throw FormatError("label count " + std::to_string(d.labels.size()) + " != point count " +
                      std::to_string(m));
  if (d.ids.size() != m) throw FormatError("id count does not match point count");
  for (std::size_t i = 0; i < m; ++i)
    if (d.labels.labels[i] >= d.labels.num_classes)
      throw FormatError("label at row " + std::to_string(i) + " is >= k");
  if (d.soft) {
    if (d.soft->size() != m) throw FormatError("soft-label count does not match point count");
    if (d.soft->num_classes() != d.labels.num_classes)
      throw FormatError("soft labels have " + std::to_string(d.soft->num_classes()) +
                        " classes, labels have " + std::to_string(d.labels.num_classes));
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(m);
  for (const auto& id : d.ids)
    if (!seen.insert(id).second) throw FormatError("duplicate id '" + id + "'");
}

PointFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? PointFormat::Csv : PointFormat::Binary;
}

std::vector<std::uint8_t> encode_points_binary(const PointSet& points) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + points.coords().size() * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(points.count()));
  put_u32(out, static_cast<std::uint32_t>(points.dim()));
  for (float v : points.coords()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

PointSet decode_points_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("missing CPTS magic");
  const std::uint32_t m = get_u32(bytes, 4);
  const std::uint32_t n = get_u32(bytes, 8);
  const std::uint64_t expected = kHeaderBytes + std::uint64_t{m} * n * 4;
  if (bytes.size() != expected)
    throw FormatError("header declares " + std::to_string(m) + "x" + std::to_string(n) +
                      " but payload has " + std::to_string(bytes.size() - kHeaderBytes) +
                      " bytes");
  std::vector<float> coords(std::size_t{m} * n);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    coords[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
    if (!std::isfinite(coords[i]))
      throw FormatError("non-finite coordinate at row " + std::to_string(i / n));
  }
  return PointSet(m, n, std::move(coords));
}

PointSet load_points(const std::filesystem::path& path, PointFormat format) {
  const std::string text = detail::read_file(path);
  if (format == PointFormat::Binary) {
    return decode_points_binary(
        {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  }
  std::vector<float> coords;
  std::size_t dim = 0;
  std::size_t rows = 0;
  for (auto line : detail::split_lines(text)) {
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (rows == 0) dim = fields.size();
    if (fields.size() != dim)
      throw FormatError(detail::where(path, rows) + ": has " + std::to_string(fields.size()) +
                        " values, expected " + std::to_string(dim));
    for (auto f : fields) {
      const double v = detail::parse_double(f, detail::where(path, rows));
      if (!std::isfinite(v) || !std::isfinite(static_cast<float>(v)))
        throw FormatError(detail::where(path, rows) + ": non-finite value");
      coords.push_back(static_cast<float>(v));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError(path.string() + ": no rows");
  return PointSet(rows, dim, std::move(coords));
}

void write_points(const std::filesystem::path& path, const PointSet& points, PointFormat format) {
  if (format == PointFormat::Binary) {
    const auto bytes = encode_points_binary(points);
    detail::write_file(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
    return;
  }
  std::string out;
  for (std::size_t i = 0; i < points.count(); ++i) {
    const auto row = points.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += detail::format_g(row[j], 9);
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

LabelFile load_labels(const std::filesystem::path& path,
                      std::optional<std::uint32_t> num_classes) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "id,label")
    throw FormatError(path.string() + ": expected header 'id,label'");
  LabelFile file;
  std::uint32_t max_label = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto fields = detail::split_fields(lines[r]);
    const std::size_t row = file.ids.size();
    if (fields.size() != 2)
      throw FormatError(detail::where(path, row) + ": expected 2 fields");
    const auto label = detail::parse_uint(fields[1], detail::where(path, row));
    if (num_classes && label >= *num_classes)
      throw FormatError(detail::where(path, row) + ": label " + std::to_string(label) +
                        " >= k=" + std::to_string(*num_classes));
    if (label > 0xFFFFFFFFu) throw FormatError(detail::where(path, row) + ": label too large");
    file.ids.emplace_back(detail::trim(fields[0]));
    file.labels.labels.push_back(static_cast<std::uint32_t>(label));
    max_label = std::max(max_label, static_cast<std::uint32_t>(label));
  }
  if (file.ids.empty()) throw FormatError(path.string() + ": no rows");
  file.labels.num_classes = num_classes.value_or(max_label + 1);
  return file;
}

SoftLabelFile load_soft_labels(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw FormatError(path.string() + ": empty file");
  const auto header = detail::split_fields(lines[0]);
  if (header.size() < 2 || detail::trim(header[0]) != "id")
    throw FormatError(path.string() + ": expected header 'id,p0,...'");
  for (std::size_t j = 1; j < header.size(); ++j)
    if (detail::trim(header[j]) != "p" + std::to_string(j - 1))
      throw FormatError(path.string() + ": header column " + std::to_string(j) +
                        " should be 'p" + std::to_string(j - 1) + "'");
  const std::size_t k = header.size() - 1;

  SoftLabelFile file;
  std::vector<double> dist;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const auto fields = detail::split_fields(lines[r]);
    const std::size_t row = file.ids.size();
    if (fields.size() != k + 1)
      throw FormatError(detail::where(path, row) + ": expected " + std::to_string(k + 1) +
                        " fields");
    file.ids.emplace_back(detail::trim(fields[0]));
    double sum = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double p = detail::parse_double(fields[j], detail::where(path, row));
      if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw FormatError(detail::where(path, row) + ": probability outside [0,1]");
      sum += p;
      dist.push_back(p);
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw FormatError(detail::where(path, row) + ": probabilities sum to " +
                        detail::format_g(sum, 10));
  }
  if (file.ids.empty()) throw FormatError(path.string() + ": no rows");
  file.soft = SoftLabelSet(k, std::move(dist));
  return file;
}

void write_labels(const std::filesystem::path& path, std::span<const std::string> ids,
                  const LabelSet& labels) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out += ids[i] + ',' + std::to_string(labels.labels[i]) + '\n';
  detail::write_file(path, out);
}

void write_soft_labels(const std::filesystem::path& path, std::span<const std::string> ids,
                       const SoftLabelSet& soft) {
  std::string out = "id";
  for (std::size_t j = 0; j < soft.num_classes(); ++j) out += ",p" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (double p : soft.row(i)) out += ',' + detail::format_g(p, 17);
    out += '\n';
  }
  detail::write_file(path, out);
}

SoftLabelSet align_soft_labels(const LabelFile& labels, const SoftLabelFile& soft) {
  const std::size_t k = soft.soft.num_classes();
  if (soft.ids.size() != labels.ids.size())
    throw FormatError("soft-labels file has " + std::to_string(soft.ids.size()) +
                      " rows, labels file has " + std::to_string(labels.ids.size()));
  for (auto label : labels.labels.labels)
    if (label >= k) throw FormatError("label " + std::to_string(label) + " >= k=" + std::to_string(k));
  std::unordered_map<std::string_view, std::size_t> row_of;
  row_of.reserve(soft.ids.size());
  for (std::size_t i = 0; i < soft.ids.size(); ++i)
    if (!row_of.emplace(soft.ids[i], i).second)
      throw FormatError("duplicate id '" + soft.ids[i] + "' in soft labels");
  std::vector<double> dist;
  dist.reserve(labels.ids.size() * k);
  for (const auto& id : labels.ids) {
    auto it = row_of.find(id);
    if (it == row_of.end()) throw FormatError("id '" + id + "' has no soft label");
    const auto row = soft.soft.row(it->second);
    dist.insert(dist.end(), row.begin(), row.end());
  }
  return SoftLabelSet(k, std::move(dist));
}

Dataset assemble(PointSet points, LabelFile labels, std::optional<SoftLabelFile> soft) {
  Dataset d;
  d.points = std::move(points);
  d.ids = std::move(labels.ids);
  d.labels = std::move(labels.labels);
  if (d.labels.size() != d.points.count())
    throw FormatError("labels file has " + std::to_string(d.labels.size()) +
                      " rows but points file has " + std::to_string(d.points.count()));
  if (soft) {
    d.soft = align_soft_labels({d.ids, d.labels}, *soft);
    d.labels.num_classes = static_cast<std::uint32_t>(d.soft->num_classes());
  }
  validate(d);
  return d;
}

Dataset load_dataset(const std::filesystem::path& points_path,
                     const std::filesystem::path& labels_path,
                     const std::optional<std::filesystem::path>& soft_path) {
  auto points = load_points(points_path, format_for_path(points_path));
  auto labels = load_labels(labels_path);
  std::optional<SoftLabelFile> soft;
  if (soft_path) soft = load_soft_labels(*soft_path);
  return assemble(std::move(points), std::move(labels), std::move(soft));
}

Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
  const std::size_t n = d.dim();
  std::vector<float> coords;
  coords.reserve(indices.size() * n);
  Dataset out;
  out.labels.num_classes = d.labels.num_classes;
  std::vector<double> dist;
  for (std::size_t i : indices) {
    const auto row = d.points.row(i);
    coords.insert(coords.end(), row.begin(), row.end());
    out.labels.labels.push_back(d.labels.labels[i]);
    out.ids.push_back(d.ids[i]);
    if (d.soft) {
      const auto s = d.soft->row(i);
      dist.insert(dist.end(), s.begin(), s.end());
    }
  }
  out.points = PointSet(indices.size(), n, std::move(coords));
  if (d.soft) out.soft = SoftLabelSet(d.soft->num_classes(), std::move(dist));
  return out;
}

SplitIndices split_indices(std::size_t count, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("split fraction must be in (0,1)");
  const auto first_size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(count)));
  if (first_size < 1) throw DomainError("split fraction * m must be at least 1");

  std::vector<std::size_t> perm(count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Xoshiro256 rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  SplitIndices out;
  out.first.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(first_size));
  out.second.assign(perm.begin() + static_cast<std::ptrdiff_t>(first_size), perm.end());
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double fraction, std::uint64_t seed) {
  const auto parts = split_indices(d.size(), fraction, seed);
  if (parts.second.empty()) throw DomainError("split leaves the second part empty");
  return {subset(d, parts.first), subset(d, parts.second)};
}

}  // namespace lucon
