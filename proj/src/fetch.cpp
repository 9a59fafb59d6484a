#include "nnrw/fetch.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "nnrw/errors.hpp"

namespace nnrw {

namespace {

constexpr const char* kUci = "https://archive.ics.uci.edu/ml/machine-learning-databases";
constexpr const char* kMnist = "https://ossci-datasets.s3.amazonaws.com/mnist";

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string download(const std::string& url) {
  const Url parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(300);
  const auto res = client.Get(parts.path);
  if (!res) throw DatasetError("download of " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw DatasetError("download of " + url + " failed: HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace

std::vector<FetchEntry> default_manifest() {
  const std::string uci = kUci;
  const std::string mnist = kMnist;
  return {
      {"satimage", "sat.trn", uci + "/statlog/satimage/sat.trn", ""},
      {"satimage", "sat.tst", uci + "/statlog/satimage/sat.tst", ""},
      {"letter", "letter-recognition.data", uci + "/letter-recognition/letter-recognition.data", ""},
      {"mnist", "train-images-idx3-ubyte.gz", mnist + "/train-images-idx3-ubyte.gz",
       "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db"},
      {"mnist", "train-labels-idx1-ubyte.gz", mnist + "/train-labels-idx1-ubyte.gz",
       "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5"},
      {"mnist", "t10k-images-idx3-ubyte.gz", mnist + "/t10k-images-idx3-ubyte.gz",
       "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7"},
      {"mnist", "t10k-labels-idx1-ubyte.gz", mnist + "/t10k-labels-idx1-ubyte.gz",
       "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2"},
  };
}

std::vector<FetchEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  std::vector<FetchEntry> entries;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw ConfigError("manifest " + path.string() + " must be a JSON array");
    for (const auto& item : doc) {
      FetchEntry e;
      e.dataset = item.at("dataset").get<std::string>();
      e.file = item.at("file").get<std::string>();
      e.url = item.at("url").get<std::string>();
      e.sha256 = item.value("sha256", std::string());
      if (e.file.empty() || e.file.find('/') != std::string::npos || e.file == "..")
        throw ConfigError("manifest entry has an invalid file name '" + e.file + "'");
      parse_benchmark(e.dataset);
      entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  return entries;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

void fetch_benchmark(Benchmark benchmark, const std::filesystem::path& data_dir,
                     const std::vector<FetchEntry>& manifest, std::ostream& log, bool force) {
  const std::string name(to_string(benchmark));
  const std::filesystem::path dir = data_dir / name;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DatasetError("cannot create " + dir.string() + ": " + ec.message());

  bool any = false;
  for (const FetchEntry& entry : manifest) {
    if (entry.dataset != name) continue;
    any = true;
    const std::filesystem::path target = dir / entry.file;
    if (!force && std::filesystem::exists(target)) {
      if (entry.sha256.empty() || sha256_hex(read_file_bytes(target)) == entry.sha256) {
        log << "present " << target.string() << '\n';
        continue;
      }
      log << "checksum differs, refetching " << target.string() << '\n';
    }

    log << "fetching " << entry.url << '\n';
    const std::string body = download(entry.url);
    std::filesystem::path partial = target;
    partial += ".part";
    {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      out.write(body.data(), static_cast<std::streamsize>(body.size()));
      if (!out) throw DatasetError("cannot write " + partial.string());
    }
    if (!entry.sha256.empty()) {
      const std::string actual = sha256_hex(read_file_bytes(partial));
      if (actual != entry.sha256) {
        std::filesystem::remove(partial, ec);
        throw DatasetError("checksum mismatch for " + entry.url + ": expected " + entry.sha256 + ", got " + actual);
      }
    }
    std::filesystem::rename(partial, target, ec);
    if (ec) throw DatasetError("cannot move " + partial.string() + " into place: " + ec.message());
  }
  if (!any) throw ConfigError("manifest has no entries for " + name);

  // Files without a pinned checksum are checked by parsing them.
  load_benchmark(benchmark, data_dir);
  log << name << " ready in " << dir.string() << '\n';
}

}  // namespace nnrw
