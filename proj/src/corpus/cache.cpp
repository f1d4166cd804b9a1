#include "lmbias/corpus/cache.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <ctime>
#include <fmt/format.h>
#include <openssl/evp.h>

namespace lmbias {
namespace {

constexpr std::string_view kHeaderPrefix = "# lmbias-cache v1";

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot read cache entry '{}'", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Header line: "# lmbias-cache v1 created_at=<utc> bytes=<n>\n", then payload.
std::string strip_header(const std::string& content, const std::filesystem::path& p) {
    const auto nl = content.find('\n');
    if (nl == std::string::npos || content.compare(0, kHeaderPrefix.size(), kHeaderPrefix) != 0) {
        throw IoError(fmt::format("corrupt cache entry '{}'", p.string()));
    }
    std::string payload = content.substr(nl + 1);
    const auto bytes_pos = content.rfind("bytes=", nl);
    if (bytes_pos != std::string::npos && bytes_pos < nl) {
        const auto declared = std::stoull(content.substr(bytes_pos + 6, nl - bytes_pos - 6));
        if (declared != payload.size()) throw IoError(fmt::format("truncated cache entry '{}'", p.string()));
    }
    return payload;
}

}  // namespace

CacheKey CacheKey::from_fields(std::initializer_list<std::string_view> fields) {
    std::string buf;
    for (const auto f : fields) {
        buf += std::to_string(f.size());
        buf += ':';
        buf.append(f);
        buf += ';';
    }
    return CacheKey(sha256_hex(buf));
}

CacheKey CacheKey::from_hex(std::string hex) {
    const bool ok = hex.size() == 64 && std::all_of(hex.begin(), hex.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
    if (!ok) throw ValidationError(fmt::format("not a cache key: '{}'", hex));
    return CacheKey(std::move(hex));
}

ResponseCache::ResponseCache(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw IoError(fmt::format("cannot create cache root '{}': {}", root_.string(), ec.message()));
}

std::filesystem::path ResponseCache::path_for(const CacheKey& key) const { return root_ / key.hex(); }

std::optional<std::string> ResponseCache::get(const CacheKey& key) const {
    const auto p = path_for(key);
    std::error_code ec;
    if (!std::filesystem::exists(p, ec)) return std::nullopt;
    return strip_header(read_file(p), p);
}

void ResponseCache::put(const CacheKey& key, std::string_view raw_output) {
    static std::atomic<unsigned long> counter{0};
    const auto final_path = path_for(key);
    const auto tmp_path =
        root_ / fmt::format(".{}.tmp.{}.{}", key.hex(), static_cast<long>(::getpid()), counter.fetch_add(1));

    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    ::gmtime_r(&now, &utc);
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot write cache temp file '{}'", tmp_path.string()));
        out << kHeaderPrefix << fmt::format(" created_at={:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z bytes={}\n", utc.tm_year + 1900,
                                             utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec,
                                             raw_output.size());
        out.write(raw_output.data(), static_cast<std::streamsize>(raw_output.size()));
        out.flush();
        if (!out) throw IoError(fmt::format("short write on '{}'", tmp_path.string()));
    }

    std::error_code ec;
    std::filesystem::create_hard_link(tmp_path, final_path, ec);
    std::error_code ignore;
    std::filesystem::remove(tmp_path, ignore);
    if (!ec) return;
    if (ec != std::errc::file_exists) {
        throw IoError(fmt::format("cannot publish cache entry '{}': {}", final_path.string(), ec.message()));
    }
    const auto existing = strip_header(read_file(final_path), final_path);
    if (existing != raw_output) {
        throw CacheConflict(fmt::format("cache entry {} already holds a different payload", key.hex()));
    }
}

}  // namespace lmbias
