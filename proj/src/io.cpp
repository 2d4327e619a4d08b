#include "bicsi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <system_error>

namespace bicsi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void write_raw(const std::filesystem::path &path, const char *data, std::size_t size) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(data, static_cast<std::streamsize>(size));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                ec.message());
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
  write_raw(path, contents.data(), contents.size());
}

void write_file_atomic(const std::filesystem::path &path,
                       std::span<const std::uint8_t> contents) {
  write_raw(path, reinterpret_cast<const char *>(contents.data()), contents.size());
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  const auto base = path.parent_path();

  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    const std::size_t row = lineno++;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (rows.empty() && body.starts_with("label,")) continue;

    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = body.find(',');
      fields.push_back(trim(body.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    if (fields.size() != 4) {
      throw ParseError("manifest row " + std::to_string(row) +
                           ": expected label,x,y,file",
                       row);
    }
    ManifestRow r;
    r.label = std::string(fields[0]);
    for (int i = 0; i < 2; ++i) {
      const auto f = fields[1 + i];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError("manifest row " + std::to_string(row) + ": bad coordinate", row);
      }
      (i == 0 ? r.coord.x : r.coord.y) = v;
    }
    const std::filesystem::path file{std::string(fields[3])};
    r.file = file.is_absolute() ? file : base / file;
    if (r.label.empty()) {
      throw ParseError("manifest row " + std::to_string(row) + ": empty label", row);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_manifest(std::span<const ManifestRow> rows) {
  std::string out = "label,x,y,file\n";
  char buf[32];
  for (const auto &r : rows) {
    out += r.label;
    for (double v : {r.coord.x, r.coord.y}) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out.push_back(',');
      out.append(buf, end);
    }
    out.push_back(',');
    out += r.file.generic_string();
    out.push_back('\n');
  }
  return out;
}

}  // namespace bicsi
