// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vortexlab {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) fail(ErrorCode::InvalidArgument, "csv row width differs from header");
  rows_.push_back(std::move(cells));
  return *this;
}

CsvTable& CsvTable::numbers(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(format_number(v));
  return row(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t a = 0; a < cells.size(); ++a) {
      if (a) out += ',';
      out += cells[a];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::IoError, "sha256 failed");
  std::ostringstream s;
  for (unsigned int a = 0; a < len; ++a) s << std::hex << std::setw(2) << std::setfill('0') << int(md[a]);
  return s.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

ArtifactWriter::ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) fail(ErrorCode::IoError, "cannot create output directory " + dir_);
}

void ArtifactWriter::text(const std::string& name, const std::string& bytes) {
  write_file((fs::path(dir_) / name).string(), bytes);
  files_.push_back(Json{{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
}

void ArtifactWriter::json(const std::string& name, const Json& value) { text(name, value.dump(2) + "\n"); }

void ArtifactWriter::csv(const std::string& name, const CsvTable& table) { text(name, table.str()); }

void ArtifactWriter::field(const std::string& name, const GridSystem& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.node_count()) fail(ErrorCode::InvalidArgument, "field dump needs a node field");
  std::string bytes(sizeof(double) * values.size(), '\0');
  for (Eigen::Index a = 0; a < values.size(); ++a) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[a]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(bytes.data() + sizeof(double) * a, &bits, sizeof bits);
  }
  text(name + ".bin", bytes);
  const Vec2 lo = grid.origin();
  const Vec2 hi = lo + grid.h() * Vec2(grid.n() - 1, grid.n() - 1);
  json(name + ".json", Json{{"nx", grid.n()},
                            {"ny", grid.n()},
                            {"bbox", {lo.x(), lo.y(), hi.x(), hi.y()}},
                            {"field_name", name},
                            {"dtype", "float64le"},
                            {"order", "row-major, x fastest"}});
}

void ArtifactWriter::manifest(const Json& config) {
  const Json m{{"config", config}, {"artifacts", files_}};
  write_file((fs::path(dir_) / "manifest.json").string(), m.dump(2) + "\n");
}

FieldDump read_field_dump(const std::string& path) {
  fs::path p(path);
  const fs::path stem = p.parent_path() / p.stem();
  Json side;
  try {
    side = Json::parse(read_file(stem.string() + ".json"));
  } catch (const Json::exception& e) {
    fail(ErrorCode::IoError, "bad field sidecar: " + std::string(e.what()));
  }
  FieldDump d;
  d.nx = side.at("nx").get<int>();
  d.ny = side.at("ny").get<int>();
  for (int a = 0; a < 4; ++a) d.bbox[a] = side.at("bbox").at(a).get<double>();
  d.field_name = side.at("field_name").get<std::string>();
  const std::string bytes = read_file(stem.string() + ".bin");
  if (bytes.size() != sizeof(double) * static_cast<std::size_t>(d.nx) * d.ny)
    fail(ErrorCode::IoError, "field dump size does not match its sidecar");
  d.values.resize(static_cast<std::size_t>(d.nx) * d.ny);
  for (std::size_t a = 0; a < d.values.size(); ++a) {
    std::uint64_t bits;
    std::memcpy(&bits, bytes.data() + sizeof(double) * a, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    d.values[a] = std::bit_cast<double>(bits);
  }
  return d;
}

namespace {

class TomlLine {
 public:
  TomlLine(const std::string& s, int lineno) : s_(s), line_(lineno) {}

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::ConfigInvalid, "line " + std::to_string(line_) + ": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  std::string key() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '"') return string();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) error("expected a key");
    return s_.substr(start, pos_ - start);
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  std::string string() {
    expect('"');
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        const char e = s_[++pos_];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += s_[pos_];
      }
      ++pos_;
    }
    if (pos_ >= s_.size()) error("unterminated string");
    ++pos_;
    return out;
  }
  Json value() {
    skip_ws();
    if (pos_ >= s_.size()) error("missing value");
    const char c = s_[pos_];
    if (c == '"') return string();
    if (c == '[') {
      ++pos_;
      Json arr = Json::array();
      if (peek(']')) {
        ++pos_;
        return arr;
      }
      while (true) {
        arr.push_back(value());
        if (peek(',')) {
          ++pos_;
          if (peek(']')) {
            ++pos_;
            return arr;
          }
          continue;
        }
        expect(']');
        return arr;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t')
      ++pos_;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::erase(tok, '_');
    if (tok.find_first_of(".eE") == std::string::npos || tok == "inf" || tok == "nan") {
      long long v = 0;
      const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (r.ec == std::errc() && r.ptr == tok.data() + tok.size()) return v;
    }
    double d = 0.0;
    const char* b = tok.data();
    if (!tok.empty() && tok[0] == '+') ++b;
    const auto r = std::from_chars(b, tok.data() + tok.size(), d);
    if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) error("cannot parse value '" + tok + "'");
    return d;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace

Json parse_toml(const std::string& text) {
  Json root = Json::object();
  Json* table = &root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TomlLine t(line, lineno);
    if (t.at_end()) continue;
    if (t.peek('[')) {
      t.expect('[');
      table = &root;
      while (true) {
        const std::string k = t.key();
        Json& next = (*table)[k];
        if (next.is_null()) next = Json::object();
        if (!next.is_object()) t.error("'" + k + "' is not a table");
        table = &next;
        if (t.peek('.')) {
          t.expect('.');
          continue;
        }
        break;
      }
      t.expect(']');
      if (!t.at_end()) t.error("trailing characters after table header");
      continue;
    }
    const std::string k = t.key();
    t.expect('=');
    Json v = t.value();
    if (!t.at_end()) t.error("trailing characters after value");
    if (table->contains(k)) t.error("duplicate key '" + k + "'");
    (*table)[k] = std::move(v);
  }
  return root;
}

Json load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  const bool toml = fs::path(path).extension() == ".toml";
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (toml || (first != std::string::npos && text[first] != '{')) return parse_toml(text);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ConfigInvalid, std::string("json: ") + e.what());
  }
}

}  // namespace vortexlab
