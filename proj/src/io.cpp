#include "klein/io.hpp"

#include "klein/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <iterator>
#include <ostream>

namespace klein {

namespace {

using Json = nlohmann::ordered_json;

Complexd parse_entry(const Json& pair, const std::string& where)
{
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
        throw Error(ErrorKind::ParseError, where + ": expected [re, im] decimal strings");
    return {parse_decimal(pair[0].get<std::string>()), parse_decimal(pair[1].get<std::string>())};
}

} // namespace

std::string format_decimal(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x); // no "-0"
    return buf;
}

double parse_decimal(std::string_view s)
{
    const std::string text(s);
    if (text.empty())
        throw Error(ErrorKind::ParseError, "empty number");
    // strtod alone would also take leading blanks, hex floats, inf and nan
    if (text.find_first_not_of("0123456789+-.eE") != std::string::npos)
        throw Error(ErrorKind::ParseError, "not a decimal: " + text);
    char* end = nullptr;
    const double x = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(x))
        throw Error(ErrorKind::ParseError, "not a finite decimal: " + text);
    return x;
}

std::string to_file_text(const SurfaceRepresentation& rep)
{
    Json matrices = Json::array();
    for (const auto& m : rep.images) {
        Json entries = Json::array();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                entries.push_back(Json::array({format_decimal(m(r, c).real()), format_decimal(m(r, c).imag())}));
        matrices.push_back(std::move(entries));
    }
    Json doc;
    doc["version"] = kFileVersion;
    doc["genus"] = rep.genus;
    doc["matrices"] = std::move(matrices);
    doc["metadata"] = rep.metadata;
    return doc.dump(2) + "\n";
}

void write_representation(std::ostream& out, const SurfaceRepresentation& rep)
{
    out << to_file_text(rep);
}

SurfaceRepresentation from_file_text(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    if (!doc.is_object())
        throw Error(ErrorKind::ParseError, "expected a JSON object");
    for (const char* field : {"version", "genus", "matrices", "metadata"})
        if (!doc.contains(field))
            throw Error(ErrorKind::ParseError, std::string("missing field ") + field);
    if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kFileVersion)
        throw Error(ErrorKind::ParseError, "unsupported version");
    if (!doc["genus"].is_number_integer())
        throw Error(ErrorKind::ParseError, "genus must be an integer");
    const int genus = doc["genus"].get<int>();
    if (genus < 2)
        throw Error(ErrorKind::InvalidInput, "genus must be at least 2");
    const Json& matrices = doc["matrices"];
    if (!matrices.is_array())
        throw Error(ErrorKind::ParseError, "matrices must be an array");
    std::vector<Mat2d> images;
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        const Json& entries = matrices[k];
        const std::string where = "matrix " + std::to_string(k);
        if (!entries.is_array() || entries.size() != 4)
            throw Error(ErrorKind::ParseError, where + ": expected four entries");
        Mat2d m;
        for (int i = 0; i < 4; ++i)
            m(i / 2, i % 2) = parse_entry(entries[i], where);
        images.push_back(m);
    }
    std::vector<std::string> metadata;
    if (!doc["metadata"].is_array())
        throw Error(ErrorKind::ParseError, "metadata must be an array");
    for (const auto& tag : doc["metadata"]) {
        if (!tag.is_string())
            throw Error(ErrorKind::ParseError, "metadata tags must be strings");
        metadata.push_back(tag.get<std::string>());
    }
    return make_representation(genus, std::move(images), std::move(metadata), kInputRelatorTolerance);
}

SurfaceRepresentation read_representation(std::istream& in)
{
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return from_file_text(text);
}

} // namespace klein
