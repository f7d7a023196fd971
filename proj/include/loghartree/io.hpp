#ifndef LOGHARTREE_IO_HPP
#define LOGHARTREE_IO_HPP

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "loghartree/grid.hpp"

namespace loghartree::io {

using ordered_json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

inline void require_parent_dir(const std::filesystem::path& p) {
  auto dir = p.parent_path();
  if (!dir.empty() && !std::filesystem::exists(dir))
    throw std::runtime_error("io: directory does not exist: " + dir.string());
}

// A Field is stored as <base>.json (metadata sidecar) + <base>.f64 (raw
// row-major little-endian float64 samples).
inline void write_field(const Field& f, const std::string& base) {
  std::filesystem::path jpath(base + ".json"), bpath(base + ".f64");
  require_parent_dir(jpath);
  ordered_json meta;
  meta["N"] = f.spec.points_per_side;
  meta["L"] = f.spec.half_width;
  meta["dtype"] = "float64-le";
  meta["layout"] = "row-major";
  std::ofstream js(jpath);
  if (!js) throw std::runtime_error("io: cannot open " + jpath.string());
  js << meta.dump(2) << "\n";
  std::ofstream bs(bpath, std::ios::binary);
  if (!bs) throw std::runtime_error("io: cannot open " + bpath.string());
  bs.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!bs) throw std::runtime_error("io: short write to " + bpath.string());
}

inline Field read_field(const std::string& base) {
  std::filesystem::path jpath(base + ".json"), bpath(base + ".f64");
  std::ifstream js(jpath);
  if (!js) throw std::runtime_error("io: cannot open " + jpath.string());
  ordered_json meta = ordered_json::parse(js);
  if (meta.value("dtype", "") != std::string("float64-le") ||
      meta.value("layout", "") != std::string("row-major"))
    throw std::runtime_error("io: unsupported field encoding in " + jpath.string());
  GridSpec spec = make_grid(meta.at("L").get<double>(), meta.at("N").get<int>());
  Field f(spec);
  std::ifstream bs(bpath, std::ios::binary);
  if (!bs) throw std::runtime_error("io: cannot open " + bpath.string());
  bs.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (bs.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(double)))
    throw std::runtime_error("io: short read from " + bpath.string());
  return f;
}

inline void write_json(const ordered_json& j, const std::string& path) {
  require_parent_dir(path);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("io: cannot open " + path);
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("io: write failed for " + path);
}

inline ordered_json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("io: cannot open " + path);
  return ordered_json::parse(is);
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  require_parent_dir(path);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("io: cannot open " + path);
  for (std::size_t c = 0; c < header.size(); ++c)
    os << header[c] << (c + 1 < header.size() ? "," : "\n");
  os.precision(17);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << row[c] << (c + 1 < row.size() ? "," : "\n");
  }
  if (!os) throw std::runtime_error("io: write failed for " + path);
}

}  // namespace loghartree::io

#endif
