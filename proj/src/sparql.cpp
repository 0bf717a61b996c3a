#include "nerforge/sparql.hpp"

#include <chrono>
#include <condition_variable>
#include <ctime>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "nerforge/text_util.hpp"

namespace nerforge {

namespace {

// scheme://host[:port] base plus request path.
struct ParsedUrl {
    std::string base;
    std::string path;
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
    const size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    const size_t path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

std::string url_encode(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size() * 3);
    for (const char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if ((u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') || (u >= '0' && u <= '9') ||
            u == '-' || u == '_' || u == '.' || u == '~') {
            out.push_back(c);
        } else {
            out.push_back('%');
            out.push_back(hex[u >> 4]);
            out.push_back(hex[u & 0xF]);
        }
    }
    return out;
}

// Characters not allowed inside a SPARQL IRI literal get percent-encoded;
// non-ASCII UTF-8 passes through (DBpedia resource IRIs are IRIs proper).
std::string iri_escape(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || u == '<' || u == '>' || u == '"' || u == '{' || u == '}' ||
            u == '|' || u == '^' || u == '`' || u == '\\') {
            out.push_back('%');
            out.push_back(hex[u >> 4]);
            out.push_back(hex[u & 0xF]);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

constexpr std::string_view kOwlThing = "http://www.w3.org/2002/07/owl#Thing";

}  // namespace

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

SparqlClient::SparqlClient(SparqlOptions options) : options_(std::move(options)) {}

EntityClassRecord SparqlClient::query_classes(const std::string& title) const {
    EntityClassRecord record;
    record.title = title;
    record.fetched_at = iso8601_now();

    const auto url = parse_url(options_.endpoint);
    if (!url) {
        std::cerr << "linker: malformed endpoint URL: " << options_.endpoint << "\n";
        record.status = QueryStatus::kError;
        return record;
    }

    const std::string query =
        "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> "
        "SELECT ?t WHERE { <" +
        iri_escape(options_.resource_prefix + title) + "> rdf:type ?t }";
    const std::string request_path = url->path + "?query=" + url_encode(query) + "&format=json";

    for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
        if (attempt > 0) {
            const auto backoff =
                std::chrono::milliseconds(options_.backoff_base_ms) * (1 << (attempt - 1));
            std::this_thread::sleep_for(backoff);
        }
        ++requests_;
        httplib::Client client(url->base);
        client.set_connection_timeout(options_.timeout_sec);
        client.set_read_timeout(options_.timeout_sec);
        client.set_follow_location(true);

        const httplib::Result res = client.Get(request_path);
        if (!res || res->status < 200 || res->status >= 300) {
            continue;
        }
        try {
            const nlohmann::json j = nlohmann::json::parse(res->body);
            for (const auto& binding : j.at("results").at("bindings")) {
                const std::string value = binding.at("t").at("value").get<std::string>();
                if (value == kOwlThing) {
                    record.classes.push_back("owl:Thing");
                } else if (starts_with(value, options_.ontology_prefix)) {
                    record.classes.push_back("dbo:" +
                                             value.substr(options_.ontology_prefix.size()));
                }
                // Types from other vocabularies are not part of the record.
            }
        } catch (const std::exception& e) {
            std::cerr << "linker: bad endpoint response for '" << title << "': " << e.what()
                      << "\n";
            continue;
        }
        record.status =
            record.classes.empty() ? QueryStatus::kNotFound : QueryStatus::kFound;
        return record;
    }
    record.status = QueryStatus::kError;
    record.classes.clear();
    return record;
}

LinkReport link_all(const std::vector<std::string>& titles, const SparqlClient& client,
                    ClassCache& cache, const LinkBudget& budget) {
    LinkReport report;

    std::vector<std::string> missing;
    for (const std::string& title : titles) {
        if (cache.contains(title)) {
            ++report.already_cached;
        } else {
            missing.push_back(title);
        }
    }
    if (missing.empty()) return report;

    const size_t workers = std::max<size_t>(1, std::min(budget.max_in_flight, missing.size()));

    std::mutex mu;
    std::condition_variable slot_ready;
    std::vector<std::optional<EntityClassRecord>> slots(missing.size());
    size_t next_task = 0;
    std::chrono::steady_clock::time_point next_allowed = std::chrono::steady_clock::now();

    auto worker = [&] {
        while (true) {
            size_t task;
            std::chrono::steady_clock::time_point start_at;
            {
                std::lock_guard lock(mu);
                if (next_task >= missing.size()) return;
                task = next_task++;
                const auto now = std::chrono::steady_clock::now();
                start_at = std::max(now, next_allowed);
                next_allowed = start_at + std::chrono::milliseconds(budget.min_delay_ms);
            }
            std::this_thread::sleep_until(start_at);
            EntityClassRecord record = client.query_classes(missing[task]);
            {
                std::lock_guard lock(mu);
                slots[task] = std::move(record);
            }
            slot_ready.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);

    // Single writer: append in submission order as results land.
    std::exception_ptr write_failure;
    for (size_t i = 0; i < missing.size(); ++i) {
        std::unique_lock lock(mu);
        slot_ready.wait(lock, [&] { return slots[i].has_value(); });
        EntityClassRecord record = std::move(*slots[i]);
        slots[i].reset();
        lock.unlock();

        switch (record.status) {
            case QueryStatus::kFound: ++report.found; break;
            case QueryStatus::kNotFound: ++report.not_found; break;
            case QueryStatus::kError: ++report.errors; break;
        }
        ++report.fetched;
        try {
            cache.insert(std::move(record));
        } catch (...) {
            // Cache-file write failure is the one fatal error here; drain the
            // workers before propagating it.
            write_failure = std::current_exception();
            {
                std::lock_guard drain(mu);
                next_task = missing.size();
            }
            break;
        }
    }

    for (std::thread& t : pool) t.join();
    if (write_failure) std::rethrow_exception(write_failure);
    return report;
}

}  // namespace nerforge
