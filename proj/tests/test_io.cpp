#include "klein/errors.hpp"
#include "klein/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace klein;

namespace {

ErrorKind read_error(const std::string& text)
{
    try {
        from_file_text(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("accepted: " << text);
    return ErrorKind::InvalidInput;
}

// Edits the serialized form of a valid representation.
std::string edited(const SurfaceRepresentation& rep, auto&& edit)
{
    auto doc = nlohmann::ordered_json::parse(to_file_text(rep));
    edit(doc);
    return doc.dump();
}

} // namespace

TEST_SUITE("io")
{
    TEST_CASE("decimal formatting")
    {
        CHECK(format_decimal(0.0) == "0");
        CHECK(format_decimal(-0.0) == "0");
        CHECK(format_decimal(1.0) == "1");
        CHECK(format_decimal(0.1) == "0.10000000000000001");
        CHECK(format_decimal(-2.5e-300) == "-2.5e-300");
        CHECK(format_decimal(1.0 / 3.0) == "0.33333333333333331");
    }

    TEST_CASE("decimal parsing is strict")
    {
        CHECK(parse_decimal("0.10000000000000001") == 0.1);
        CHECK(parse_decimal("-3") == -3.0);
        CHECK(parse_decimal("1e-5") == 1e-5);
        for (const char* bad : {"", " 1", "1 ", "1.0x", "nan", "inf", "1e999", "0x1p3", "--1"})
            CHECK_THROWS_AS(parse_decimal(bad), Error);
    }

    TEST_CASE("format then parse is the identity on doubles (property)")
    {
        std::mt19937_64 rng(163);
        std::uniform_int_distribution<std::uint64_t> bits;
        int checked = 0;
        while (checked < 2000) {
            const std::uint64_t b = bits(rng);
            double x;
            std::memcpy(&x, &b, sizeof x);
            if (!std::isfinite(x))
                continue;
            const double y = parse_decimal(format_decimal(x));
            CHECK((y == x || (x == 0.0 && y == 0.0)));
            ++checked;
        }
    }

    TEST_CASE("write, read, write reproduces the bytes")
    {
        std::mt19937_64 rng(167);
        for (const auto& rep : {fuchsian_base(2), bend(fuchsian_base(3), 2, Complexd(0.01, -0.02)),
                                conjugate(fuchsian_base(2), random_conjugator(rng))}) {
            const std::string text = to_file_text(rep);
            const auto back = from_file_text(text);
            CHECK(to_file_text(back) == text);
            CHECK(back.genus == rep.genus);
            CHECK(back.metadata == rep.metadata);
            for (std::size_t k = 0; k < rep.images.size(); ++k)
                CHECK(back.images[k] == rep.images[k]);

            std::ostringstream out;
            write_representation(out, rep);
            std::istringstream in(out.str());
            CHECK(to_file_text(read_representation(in)) == text);
        }
    }

    TEST_CASE("malformed files are rejected")
    {
        const auto rep = fuchsian_base(2);
        CHECK(read_error("not json") == ErrorKind::ParseError);
        CHECK(read_error("[1, 2]") == ErrorKind::ParseError);
        for (const char* field : {"version", "genus", "matrices", "metadata"})
            CHECK(read_error(edited(rep, [&](auto& d) { d.erase(field); })) == ErrorKind::ParseError);
        CHECK(read_error(edited(rep, [](auto& d) { d["version"] = 2; })) == ErrorKind::ParseError);
        CHECK(read_error(edited(rep, [](auto& d) { d["genus"] = "2"; })) == ErrorKind::ParseError);
        CHECK(read_error(edited(rep, [](auto& d) { d["genus"] = 1; })) == ErrorKind::InvalidInput);
        // genus 3 needs six matrices
        CHECK(read_error(edited(rep, [](auto& d) { d["genus"] = 3; })) == ErrorKind::InvalidInput);
        CHECK(read_error(edited(rep, [](auto& d) { d["matrices"].erase(3); })) == ErrorKind::InvalidInput);
        CHECK(read_error(edited(rep, [](auto& d) { d["matrices"][0].erase(0); })) == ErrorKind::ParseError);
        CHECK(read_error(edited(rep, [](auto& d) { d["matrices"][0][0][0] = 1.0; })) == ErrorKind::ParseError);
        CHECK(read_error(edited(rep, [](auto& d) { d["matrices"][0][0][0] = "1.0abc"; })) == ErrorKind::ParseError);
        CHECK(read_error(edited(rep, [](auto& d) { d["metadata"] = {1}; })) == ErrorKind::ParseError);
    }

    TEST_CASE("files violating the relator or unimodularity are rejected")
    {
        const auto rep = fuchsian_base(2);
        // perturb one entry well beyond the input tolerance
        CHECK(read_error(edited(rep, [](auto& d) {
                  const double x = parse_decimal(d["matrices"][1][1][0].template get<std::string>());
                  d["matrices"][1][1][0] = format_decimal(x + 1e-6);
              })) == ErrorKind::InvalidInput);
        // a scaled matrix is not unimodular
        CHECK(read_error(edited(rep, [](auto& d) {
                  for (int i = 0; i < 4; ++i) {
                      const double x = parse_decimal(d["matrices"][0][i][0].template get<std::string>());
                      d["matrices"][0][i][0] = format_decimal(2 * x);
                  }
              })) == ErrorKind::InvalidInput);
    }
}
