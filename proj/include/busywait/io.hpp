#pragma once

#include "busywait/annotated.hpp"
#include "busywait/pograph.hpp"
#include "busywait/proof.hpp"
#include "busywait/semantics.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace busywait {

using Json = nlohmann::ordered_json;

/// Malformed file contents: bad JSON, missing fields, unparsable text.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const ThreadPool& pool);
Json to_json(const Trace& trace);

Json to_json(const AnnotatedThreadPool& pool);
Json to_json(const AnnotatedTrace& trace);
AnnotatedTrace annotated_trace_from_json(const Json& j);

Json to_json(const ViewShiftChain& chain);
ViewShiftChain chain_from_json(const Json& j);

Json to_json(const ProofTree& tree);
ProofTree proof_from_json(const Json& j);

Json to_json(const ProgramOrderGraph& g);

/// Throws FormatError on invalid JSON.
Json parse_json(const std::string& text);

/// Throw std::runtime_error on I/O failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace busywait
