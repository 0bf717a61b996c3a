#include "nerforge/class_cache.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace nerforge {

using nlohmann::json;

std::string to_string(QueryStatus status) {
    switch (status) {
        case QueryStatus::kFound: return "found";
        case QueryStatus::kNotFound: return "not_found";
        case QueryStatus::kError: return "error";
    }
    return "error";
}

QueryStatus query_status_from_string(const std::string& s) {
    if (s == "found") return QueryStatus::kFound;
    if (s == "not_found") return QueryStatus::kNotFound;
    if (s == "error") return QueryStatus::kError;
    throw std::runtime_error("unknown query status: '" + s + "'");
}

std::string record_to_jsonl(const EntityClassRecord& record) {
    const json j = {{"title", record.title},
                    {"classes", record.classes},
                    {"fetched_at", record.fetched_at},
                    {"status", to_string(record.status)}};
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

EntityClassRecord record_from_jsonl(const std::string& line) {
    const json j = json::parse(line);
    EntityClassRecord record;
    record.title = j.at("title").get<std::string>();
    record.classes = j.at("classes").get<std::vector<std::string>>();
    record.fetched_at = j.at("fetched_at").get<std::string>();
    record.status = query_status_from_string(j.at("status").get<std::string>());
    if (record.classes.empty() != (record.status != QueryStatus::kFound)) {
        throw std::runtime_error("cache record for '" + record.title +
                                 "': classes must be non-empty iff status is found");
    }
    return record;
}

ClassCache ClassCache::load(const std::filesystem::path& path) {
    ClassCache cache;
    std::ifstream in(path, std::ios::binary);
    if (!in) return cache;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            EntityClassRecord record = record_from_jsonl(line);
            cache.records_[record.title] = std::move(record);
        } catch (const std::exception& e) {
            if (in.peek() == std::ifstream::traits_type::eof()) {
                // Torn final line from an interrupted append; the entity is
                // simply treated as unfetched and will be queried again.
                std::cerr << "cache: dropping torn final line " << lineno << " of "
                          << path.string() << "\n";
                break;
            }
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
    }
    return cache;
}

const EntityClassRecord* ClassCache::find(const std::string& title) const {
    const auto it = records_.find(title);
    return it == records_.end() ? nullptr : &it->second;
}

void ClassCache::insert(EntityClassRecord record) {
    const std::string line = record_to_jsonl(record);
    const std::string title = record.title;
    records_[title] = std::move(record);
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw std::runtime_error("cannot append to cache file: " + path_.string());
        out << line << '\n';
        out.flush();
    }
}

void ClassCache::attach(const std::filesystem::path& path) {
    if (!path.parent_path().empty()) {
        std::filesystem::create_directories(path.parent_path());
    }
    path_ = path;
}

}  // namespace nerforge
