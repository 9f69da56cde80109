#ifndef BHB_REPORT_HPP
#define BHB_REPORT_HPP

// CSV tables and JSON documents written by the experiment runner.

#include <bhb/errors.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace bhb {

#ifndef BHB_VERSION
#define BHB_VERSION "0.0.0"
#endif

inline constexpr const char* version = BHB_VERSION;

/// Scientific notation with 12 significant digits; non-finite values print as "nan".
inline std::string format_number(double v)
{
    if (!std::isfinite(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    /// Cells are preformatted strings; use format_number for reals.
    void add(std::vector<std::string> cells)
    {
        if (cells.size() != header_.size())
            throw SizeError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header_.size()));
        rows_.push_back(std::move(cells));
    }

    std::size_t rows() const noexcept { return rows_.size(); }

    std::string str() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t k = 0; k < cells.size(); ++k) {
                if (k)
                    out += ',';
                out += cells[k];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_)
            line(r);
        return out;
    }

    void write(const std::filesystem::path& path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + path.string());
        f << str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Manifest written next to every run's artifacts.
inline nlohmann::json manifest(const std::string& subcommand, const nlohmann::json& config,
                               const std::vector<std::string>& artifacts, std::size_t warnings)
{
    return {{"subcommand", subcommand}, {"version", version},   {"timestamp", utc_timestamp()},
            {"config", config},         {"artifacts", artifacts}, {"warnings", warnings}};
}

} // namespace bhb

#endif // BHB_REPORT_HPP
