#include "ges/attack_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace ges {

namespace fs = std::filesystem;

namespace {

constexpr const char* kHeaderName = "attack.json";
constexpr const char* kPredictionsName = "predictions.f32";
constexpr const char* kPlaintextsName = "plaintexts.u8";

void write_floats_le(std::ofstream& out, const float* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
    } else {
        std::vector<char> buf(count * 4);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t bits = std::bit_cast<std::uint32_t>(data[i]);
            buf[4 * i + 0] = static_cast<char>(bits & 0xFF);
            buf[4 * i + 1] = static_cast<char>((bits >> 8) & 0xFF);
            buf[4 * i + 2] = static_cast<char>((bits >> 16) & 0xFF);
            buf[4 * i + 3] = static_cast<char>((bits >> 24) & 0xFF);
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

void read_floats_le(std::ifstream& in, float* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 4));
    } else {
        std::vector<unsigned char> buf(count * 4);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint32_t bits = std::uint32_t(buf[4 * i]) | (std::uint32_t(buf[4 * i + 1]) << 8) |
                                       (std::uint32_t(buf[4 * i + 2]) << 16) |
                                       (std::uint32_t(buf[4 * i + 3]) << 24);
            data[i] = std::bit_cast<float>(bits);
        }
    }
}

} // namespace

void save_attack_set(const std::string& dir, const AttackSet& attack) {
    attack.validate();
    fs::create_directories(dir);

    const nlohmann::json header{{"n_traces", attack.n_traces()},
                                {"keyspace", attack.keyspace},
                                {"true_key", int(attack.true_key)}};
    {
        std::ofstream out(fs::path(dir) / kHeaderName);
        if (!out)
            throw std::runtime_error("attack set: cannot write " + (fs::path(dir) / kHeaderName).string());
        out << header.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / kPredictionsName, std::ios::binary);
        if (!out)
            throw std::runtime_error("attack set: cannot write " +
                                     (fs::path(dir) / kPredictionsName).string());
        write_floats_le(out, attack.predictions.data(), attack.predictions.size());
    }
    {
        std::ofstream out(fs::path(dir) / kPlaintextsName, std::ios::binary);
        if (!out)
            throw std::runtime_error("attack set: cannot write " +
                                     (fs::path(dir) / kPlaintextsName).string());
        out.write(reinterpret_cast<const char*>(attack.plaintexts.data()),
                  static_cast<std::streamsize>(attack.plaintexts.size()));
    }
}

AttackSet load_attack_set(const std::string& path) {
    fs::path header_path(path);
    if (fs::is_directory(header_path)) header_path /= kHeaderName;
    std::ifstream header_in(header_path);
    if (!header_in)
        throw std::runtime_error("attack set: cannot open " + header_path.string());

    nlohmann::json header;
    try {
        header_in >> header;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("attack set: " + header_path.string() + " is not valid JSON: " + e.what());
    }

    std::size_t n_traces = 0;
    AttackSet attack;
    try {
        n_traces = header.at("n_traces").get<std::size_t>();
        attack.keyspace = header.at("keyspace").get<int>();
        attack.true_key = static_cast<std::uint8_t>(header.at("true_key").get<int>());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("attack set: " + header_path.string() + " is missing fields: " + e.what());
    }
    if (attack.keyspace < 2 || attack.keyspace > 256)
        throw std::runtime_error("attack set: " + header_path.string() + " has keyspace " +
                                 std::to_string(attack.keyspace) + " outside [2, 256]");

    const fs::path dir = header_path.parent_path();
    const fs::path pred_path = dir / kPredictionsName;
    const fs::path pt_path = dir / kPlaintextsName;

    attack.predictions = Matrix<float>(n_traces, attack.keyspace);
    {
        std::ifstream in(pred_path, std::ios::binary);
        if (!in)
            throw std::runtime_error("attack set: cannot open " + pred_path.string());
        read_floats_le(in, attack.predictions.data(), attack.predictions.size());
        if (!in || in.peek() != EOF)
            throw std::runtime_error("attack set: " + pred_path.string() + " does not hold exactly " +
                                     std::to_string(n_traces) + "x" + std::to_string(attack.keyspace) +
                                     " float32 values");
    }
    {
        std::ifstream in(pt_path, std::ios::binary);
        if (!in)
            throw std::runtime_error("attack set: cannot open " + pt_path.string());
        attack.plaintexts.resize(n_traces);
        in.read(reinterpret_cast<char*>(attack.plaintexts.data()), static_cast<std::streamsize>(n_traces));
        if (!in || in.peek() != EOF)
            throw std::runtime_error("attack set: " + pt_path.string() + " does not hold exactly " +
                                     std::to_string(n_traces) + " bytes");
    }

    attack.validate();
    return attack;
}

} // namespace ges
