#include "cvwit/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace cvwit {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

void write_complexes(std::ostream& os, const Complex* data, long count) {
  // Assumes IEEE-754 little-endian doubles, as on every supported target.
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(count) * sizeof(Complex));
}

void read_complexes(std::istream& is, Complex* data, long count) {
  is.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count) * sizeof(Complex));
}

}  // namespace

void save_density(const DensityMatrix& dm, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("save_density: cannot open " + path);

  nlohmann::json header = {{"N", dm.reg.num_modes},
                           {"d", dm.reg.cutoff},
                           {"layout", "row-major"},
                           {"convention", "sqrt2-quadratures"},
                           {"pure", dm.pure.has_value()}};
  const std::string htext = header.dump();

  os.write("CVDM", 4);
  write_u32(os, static_cast<std::uint32_t>(htext.size()));
  os.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  if (dm.pure) {
    write_complexes(os, dm.pure->data(), dm.pure->size());
  } else {
    // Eigen stores column-major; emit row-major as documented.
    const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor>
        rm = dm.rho;
    write_complexes(os, rm.data(), rm.size());
  }
  if (!os) throw ValidationError("save_density: write failed for " + path);
}

DensityMatrix load_density(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("load_density: cannot open " + path);

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CVDM", 4) != 0)
    throw ValidationError("load_density: bad magic in " + path);

  const std::uint32_t hlen = read_u32(is);
  std::string htext(hlen, '\0');
  is.read(htext.data(), hlen);
  const auto header = nlohmann::json::parse(htext);

  const ModeRegister reg(header.at("N").get<int>(), header.at("d").get<int>());
  if (header.value("layout", "row-major") != std::string("row-major") ||
      header.value("convention", "sqrt2-quadratures") !=
          std::string("sqrt2-quadratures"))
    throw ValidationError("load_density: unsupported layout/convention");

  if (header.value("pure", false)) {
    Vector psi(reg.total_dim);
    read_complexes(is, psi.data(), psi.size());
    if (!is) throw ValidationError("load_density: truncated file " + path);
    return density_from_pure(std::move(psi), reg);
  }
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      reg.total_dim, reg.total_dim);
  read_complexes(is, rm.data(), rm.size());
  if (!is) throw ValidationError("load_density: truncated file " + path);
  return density_from_matrix(Matrix(rm), reg);
}

nlohmann::json certificate_to_json(const StructureCertificate& cert,
                                   const ObservableSet& set) {
  nlohmann::json j;
  j["structure"] = cert.structure.to_string();
  j["young_class"] = cert.structure.young_string();
  j["order"] = set.order;
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : cert.targets) targets.push_back(t.to_string());
  j["targets"] = std::move(targets);
  j["status"] = cert.status;
  j["intersection_dim"] = cert.intersection_dim;
  j["full_space_fallback"] = cert.full_space_fallback;
  j["threshold"] = cert.threshold;
  j["certified"] = cert.certified();
  if (cert.has_candidate()) {
    j["g"] = cert.g;
    j["per_target_w"] = cert.per_target;
    const auto labels = coefficient_labels(set);
    nlohmann::json c = nlohmann::json::object();
    for (long i = 0; i < cert.c_opt.size(); ++i) c[labels[i]] = cert.c_opt(i);
    j["c_opt"] = std::move(c);
  } else {
    j["g"] = nullptr;
  }
  j["tolerances"] = {{"tau_pos_rel", tol::pos_subspace_rel},
                     {"tau_int", tol::intersection},
                     {"certification_rel", tol::certification_rel}};
  return j;
}

}  // namespace cvwit
