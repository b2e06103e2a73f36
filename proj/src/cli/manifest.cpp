#include "structprobe/cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>

#include "structprobe/io/json_codec.hpp"

namespace structprobe::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

void update_manifest(const std::filesystem::path& dir, const std::vector<std::filesystem::path>& artifacts) {
  namespace fs = std::filesystem;
  const fs::path manifest = dir / "manifest.json";
  std::map<std::string, io::Json> entries;
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    try {
      const auto old = io::Json::parse(in);
      for (const auto& e : old.at("artifacts")) {
        const auto rel = e.at("path").get<std::string>();
        if (fs::exists(dir / rel)) entries[rel] = e;
      }
    } catch (const nlohmann::json::exception&) {
      entries.clear(); // unreadable manifest is rebuilt from scratch
    }
  }
  for (const auto& a : artifacts) {
    const std::string rel = fs::relative(a, dir).generic_string();
    entries[rel] = {{"path", rel}, {"bytes", fs::file_size(a)}, {"sha256", sha256_file(a)}};
  }
  io::Json j;
  j["artifacts"] = io::Json::array();
  for (auto& [rel, e] : entries) j["artifacts"].push_back(e);
  std::ofstream out(manifest, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + manifest.string());
}

} // namespace structprobe::cli
