#include "ivtf_cli/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "ivtf/errors.hpp"

namespace ivtf::cli {

namespace {

struct Hasher
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

    Hasher()
    {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
            throw Error("sha256: digest initialisation failed");
    }

    void update(const void* data, std::size_t n)
    {
        if (EVP_DigestUpdate(ctx.get(), data, n) != 1)
            throw Error("sha256: digest update failed");
    }

    std::string finish()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
            throw Error("sha256: digest finalisation failed");
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        out.reserve(2 * len);
        for (unsigned int i = 0; i < len; ++i)
        {
            out += kHex[md[i] >> 4];
            out += kHex[md[i] & 0xF];
        }
        return out;
    }
};

}  // namespace

std::string sha256_hex(std::string_view bytes)
{
    Hasher h;
    h.update(bytes.data(), bytes.size());
    return h.finish();
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    Hasher h;
    std::array<char, 1 << 16> buf{};
    while (in)
    {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0)
            h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.finish();
}

}  // namespace ivtf::cli
