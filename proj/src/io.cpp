#include "ans/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace ans {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated snapshot file");
  return v;
}

}  // namespace

void write_snapshot(const fs::path& path, const VelocityField& u, double t) {
  const VelocityField p = to_physical(u);
  const Grid& g = p.grid();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write("ANS1", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n_h()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n_h()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n_v()));
  put<double>(os, g.L_h());
  put<double>(os, g.L_v());
  put<double>(os, t);
  for (const auto& c : p.components()) {
    const auto d = c.physical();
    os.write(reinterpret_cast<const char*>(d.data()),
             static_cast<std::streamsize>(d.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

LoadedSnapshot read_snapshot(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "ANS1", 4) != 0)
    throw std::runtime_error(path.string() + ": bad magic");
  const auto n1 = get<std::uint32_t>(is);
  const auto n2 = get<std::uint32_t>(is);
  const auto n3 = get<std::uint32_t>(is);
  if (n1 != n2) throw std::runtime_error(path.string() + ": unequal horizontal sizes");
  const double L_h = get<double>(is);
  const double L_v = get<double>(is);
  const double t = get<double>(is);
  const Grid g = make_grid(static_cast<int>(n1), static_cast<int>(n3), L_h, L_v);
  VelocityField u = VelocityField::zeros(g, Representation::physical);
  for (int k = 0; k < 3; ++k) {
    auto d = u[k].physical();
    is.read(reinterpret_cast<char*>(d.data()),
            static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!is) throw std::runtime_error(path.string() + ": truncated field data");
  }
  u.certify();
  return {t, std::move(u)};
}

void save_store(const SnapshotStore& store, const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::json index;
  index["format"] = "ANS1";
  index["schedule"] = store.schedule();
  index["snapshots"] = nlohmann::json::array();
  for (std::size_t i = 0; i < store.size(); ++i) {
    std::ostringstream name;
    name << "snap_" << std::setw(4) << std::setfill('0') << i << ".bin";
    write_snapshot(dir / name.str(), store.at(i), store.times()[i]);
    index["snapshots"].push_back({{"t", store.times()[i]}, {"file", name.str()}});
  }
  std::ofstream os(dir / "store.json");
  os << std::setw(2) << index << '\n';
  if (!os) throw std::runtime_error("cannot write store index in " + dir.string());
}

SnapshotStore load_store(const fs::path& dir) {
  std::ifstream is(dir / "store.json");
  if (!is) throw std::runtime_error("no store.json in " + dir.string());
  const nlohmann::json index = nlohmann::json::parse(is);
  const auto& snaps = index.at("snapshots");
  if (snaps.empty()) throw std::runtime_error("store index lists no snapshots");
  std::vector<LoadedSnapshot> loaded;
  for (const auto& s : snaps) {
    LoadedSnapshot snap = read_snapshot(dir / s.at("file").get<std::string>());
    if (snap.t != s.at("t").get<double>())
      throw std::runtime_error("snapshot time disagrees with store index");
    loaded.push_back(std::move(snap));
  }
  SnapshotStore store(loaded.front().u.grid(), index.at("schedule").get<std::string>());
  for (auto& s : loaded) store.append(s.t, s.u);
  return store;
}

void write_series_csv(const fs::path& path, const std::vector<DecaySeries>& series) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "series_label,t,value,scaled_value\n";
  os << std::setprecision(17);
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.size(); ++i)
      os << s.label << ',' << s.times[i] << ',' << s.values[i] << ',' << s.scaled[i] << '\n';
}

std::vector<DecaySeries> read_series_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  if (line != "series_label,t,value,scaled_value")
    throw std::runtime_error(path.string() + ": unexpected CSV header");
  std::vector<DecaySeries> out;
  std::map<std::string, std::size_t> where;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string label, t, v, s;
    std::getline(ss, label, ',');
    std::getline(ss, t, ',');
    std::getline(ss, v, ',');
    std::getline(ss, s, ',');
    auto it = where.find(label);
    if (it == where.end()) {
      it = where.emplace(label, out.size()).first;
      out.push_back(DecaySeries{});
      out.back().label = label;
    }
    DecaySeries& d = out[it->second];
    d.times.push_back(std::stod(t));
    d.values.push_back(std::stod(v));
    d.scaled.push_back(std::stod(s));
  }
  return out;
}

}  // namespace ans
