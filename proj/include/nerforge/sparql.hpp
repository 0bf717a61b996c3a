// SPARQL endpoint client: per-entity rdf:type queries with bounded retries,
// plus the cache-driven fetch loop with a concurrency/rate budget.
#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "nerforge/class_cache.hpp"

namespace nerforge {

struct SparqlOptions {
    std::string endpoint = "https://dbpedia.org/sparql";
    std::string resource_prefix = "http://dbpedia.org/resource/";
    std::string ontology_prefix = "http://dbpedia.org/ontology/";
    int max_attempts = 3;      // bounded retries on endpoint failure
    int backoff_base_ms = 1000;  // exponential: base, 2*base, ...
    int timeout_sec = 30;
};

class SparqlClient {
  public:
    explicit SparqlClient(SparqlOptions options);

    // rdf:type values of the entity resource, restricted to the ontology
    // namespace plus owl:Thing, in endpoint order. Never throws: persistent
    // endpoint failure yields status=error and the pipeline moves on.
    EntityClassRecord query_classes(const std::string& title) const;

    const SparqlOptions& options() const { return options_; }
    uint64_t requests_issued() const { return requests_.load(); }

  private:
    SparqlOptions options_;
    mutable std::atomic<uint64_t> requests_{0};
};

struct LinkBudget {
    size_t max_in_flight = 4;
    int min_delay_ms = 100;  // minimum spacing between request starts
};

struct LinkReport {
    uint64_t fetched = 0;
    uint64_t already_cached = 0;
    uint64_t found = 0;
    uint64_t not_found = 0;
    uint64_t errors = 0;
};

// Fetches every title missing from the cache; cached titles never trigger a
// request. Records are appended in title submission order, one flush per
// record, so an interrupted run resumes where it stopped.
LinkReport link_all(const std::vector<std::string>& titles, const SparqlClient& client,
                    ClassCache& cache, const LinkBudget& budget = {});

// "2026-01-31T12:00:00Z" (UTC, second resolution).
std::string iso8601_now();

}  // namespace nerforge
