#include "isar/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace isar::io {

namespace {

void append(std::string& bytes, const void* p, std::size_t n) {
  bytes.append(static_cast<const char*>(p), n);
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("io: truncated file");
  return v;
}

}  // namespace

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("io: cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("io: short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("io: cannot rename " + tmp + " to " + path);
}

void write_sinogram(const sim::Sinogram& s, const std::string& path) {
  std::string bytes;
  bytes.append("ISGM", 4);
  const std::uint16_t version = 1;
  append(bytes, &version, sizeof version);
  const std::uint32_t n_angles = static_cast<std::uint32_t>(s.n_angles());
  const std::uint32_t n_bins = static_cast<std::uint32_t>(s.n_bins());
  append(bytes, &n_angles, sizeof n_angles);
  append(bytes, &n_bins, sizeof n_bins);
  append(bytes, &s.axis.r_min, sizeof(double));
  append(bytes, &s.axis.r_max, sizeof(double));
  append(bytes, s.angles_deg.data(), s.angles_deg.size() * sizeof(double));
  std::vector<float> data32(s.data.begin(), s.data.end());
  append(bytes, data32.data(), data32.size() * sizeof(float));
  write_file_atomic(path, bytes);
}

sim::Sinogram read_sinogram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ISGM", 4) != 0)
    throw std::runtime_error("io: " + path + " is not a sinogram file");
  const auto version = read_pod<std::uint16_t>(in);
  if (version != 1) throw std::runtime_error("io: unsupported sinogram version");
  const auto n_angles = read_pod<std::uint32_t>(in);
  const auto n_bins = read_pod<std::uint32_t>(in);
  const auto r_min = read_pod<double>(in);
  const auto r_max = read_pod<double>(in);
  sim::Sinogram s;
  s.axis = RangeAxis(r_min, r_max, static_cast<int>(n_bins));
  s.angles_deg.resize(n_angles);
  in.read(reinterpret_cast<char*>(s.angles_deg.data()),
          static_cast<std::streamsize>(n_angles * sizeof(double)));
  std::vector<float> data32(static_cast<std::size_t>(n_angles) * n_bins);
  in.read(reinterpret_cast<char*>(data32.data()),
          static_cast<std::streamsize>(data32.size() * sizeof(float)));
  if (!in) throw std::runtime_error("io: truncated sinogram file");
  s.data.assign(data32.begin(), data32.end());
  return s;
}

void write_sinogram_csv(const sim::Sinogram& s, const std::string& path) {
  std::ostringstream out;
  out.precision(17);
  out << "# ISGM-CSV v1\n";
  out << "n_angles," << s.n_angles() << "\n";
  out << "n_bins," << s.n_bins() << "\n";
  out << "r_min," << s.axis.r_min << "\n";
  out << "r_max," << s.axis.r_max << "\n";
  for (int k = 0; k < s.n_angles(); ++k) {
    out << s.angles_deg[k];
    const double* row = s.row(k);
    for (int i = 0; i < s.n_bins(); ++i) out << ',' << row[i];
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

sim::Sinogram read_sinogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ISGM-CSV", 0) != 0)
    throw std::runtime_error("io: " + path + " is not a sinogram CSV");
  auto read_kv = [&in](const char* key) {
    std::string l;
    std::getline(in, l);
    const auto comma = l.find(',');
    if (comma == std::string::npos || l.substr(0, comma) != key)
      throw std::runtime_error(std::string("io: expected CSV key ") + key);
    return l.substr(comma + 1);
  };
  const int n_angles = std::stoi(read_kv("n_angles"));
  const int n_bins = std::stoi(read_kv("n_bins"));
  const double r_min = std::stod(read_kv("r_min"));
  const double r_max = std::stod(read_kv("r_max"));
  sim::Sinogram s;
  s.axis = RangeAxis(r_min, r_max, n_bins);
  s.angles_deg.resize(n_angles);
  s.data.resize(static_cast<std::size_t>(n_angles) * n_bins);
  for (int k = 0; k < n_angles; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("io: truncated sinogram CSV");
    std::istringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) throw std::runtime_error("io: bad CSV row");
    s.angles_deg[k] = std::stod(cell);
    for (int i = 0; i < n_bins; ++i) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("io: short CSV row");
      s.row(k)[i] = std::stod(cell);
    }
  }
  return s;
}

void write_image_raw(const ReconImage& img, const std::string& path) {
  std::string bytes;
  bytes.append("IFLT", 4);
  const std::uint32_t w = static_cast<std::uint32_t>(img.grid.width);
  const std::uint32_t h = static_cast<std::uint32_t>(img.grid.height);
  append(bytes, &w, sizeof w);
  append(bytes, &h, sizeof h);
  append(bytes, &img.grid.extent, sizeof(double));
  std::vector<float> pix32(img.pixels.begin(), img.pixels.end());
  append(bytes, pix32.data(), pix32.size() * sizeof(float));
  write_file_atomic(path, bytes);
}

ReconImage read_image_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "IFLT", 4) != 0)
    throw std::runtime_error("io: " + path + " is not a raw image file");
  const auto w = read_pod<std::uint32_t>(in);
  const auto h = read_pod<std::uint32_t>(in);
  const auto extent = read_pod<double>(in);
  GridSpec grid;
  grid.width = static_cast<int>(w);
  grid.height = static_cast<int>(h);
  grid.extent = extent;
  ReconImage img(grid);
  std::vector<float> pix32(img.pixels.size());
  in.read(reinterpret_cast<char*>(pix32.data()),
          static_cast<std::streamsize>(pix32.size() * sizeof(float)));
  if (!in) throw std::runtime_error("io: truncated raw image");
  img.pixels.assign(pix32.begin(), pix32.end());
  return img;
}

void write_image_pgm(const ReconImage& img, const std::string& path, double db_floor) {
  double lo = img.pixels.empty() ? 0.0 : img.pixels[0];
  double hi = lo;
  for (double v : img.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> display(img.pixels);
  if (db_floor < 0.0 && hi > 0.0) {
    // dB relative to the peak, clipped at db_floor and rescaled to [0, 1]
    for (auto& v : display) {
      const double db = 20.0 * std::log10(std::max(v, 0.0) / hi + 1e-300);
      v = (std::max(db, db_floor) - db_floor) / (-db_floor);
    }
    lo = 0.0;
    hi = 1.0;
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::string bytes = "P5\n" + std::to_string(img.grid.width) + " " +
                      std::to_string(img.grid.height) + "\n255\n";
  bytes.reserve(bytes.size() + display.size());
  for (int r = img.grid.height - 1; r >= 0; --r)  // row 0 is the -y edge; PGM top-down
    for (int c = 0; c < img.grid.width; ++c) {
      const double v = (display[static_cast<std::size_t>(r) * img.grid.width + c] - lo) / span;
      bytes.push_back(static_cast<char>(std::lround(std::min(std::max(v, 0.0), 1.0) * 255.0)));
    }
  write_file_atomic(path, bytes);
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace isar::io
