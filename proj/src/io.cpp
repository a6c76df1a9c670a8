#include "wnls/io.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/sha.h>

namespace wnls {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view bytes) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string sha1_hex(std::string_view bytes) {
  std::array<unsigned char, SHA_DIGEST_LENGTH> md{};
  SHA1(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md.data());
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : md) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

std::string git_blob_hash(std::string_view bytes) {
  std::string buf = "blob " + std::to_string(bytes.size());
  buf += '\0';
  buf.append(bytes);
  return sha1_hex(buf);
}

nlohmann::json provenance(const RunConfig& cfg) {
  nlohmann::json j;
  j["config"] = cfg.values();
  j["config_hash"] = git_blob_hash(cfg.to_text());
  return j;
}

std::string report_json(const RunConfig& cfg, const ExperimentReport& rep) {
  nlohmann::json j = provenance(cfg);
  j["report"] = rep.to_json();
  return dump_json(j);
}

std::string field_csv(const SpectralField& f) {
  std::string out = "n,re,im\n";
  for (int n = -f.cutoff(); n <= f.cutoff(); ++n) {
    const cplx c = f.coeff(n);
    out += std::to_string(n) + "," + format_double(c.real()) + "," + format_double(c.imag()) + "\n";
  }
  return out;
}

std::string trajectory_dump(const RunConfig& cfg, const TrajectoryRecord& rec) {
  nlohmann::json h = provenance(cfg);
  h["variant"] = to_string(rec.spec.variant);
  h["cutoff"] = rec.spec.cutoff;
  h["t_end"] = rec.spec.t_end;
  h["dt"] = rec.dt;
  h["steps"] = rec.steps;
  h["samples"] = rec.size();
  std::string out = "#" + h.dump() + "\n";
  out += "t,n,re,im\n";
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const auto& u = rec.states[k];
    const std::string t = format_double(rec.times[k]);
    for (int n = -u.cutoff(); n <= u.cutoff(); ++n) {
      const cplx c = u.coeff(n);
      out += t + "," + std::to_string(n) + "," + format_double(c.real()) + "," + format_double(c.imag()) + "\n";
    }
  }
  return out;
}

}  // namespace wnls
