#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpgl {

// Base for every error raised by the library. kind() is a stable
// machine-readable tag; the CLI reports it in its JSON error object.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error("InvalidArgument", what) {}
};

struct DisconnectedGraph : Error {
    explicit DisconnectedGraph(const std::string& what) : Error("DisconnectedGraph", what) {}
};

struct CoincidentVertices : Error {
    CoincidentVertices(std::size_t i, std::size_t j)
        : Error("CoincidentVertices",
                "vertices " + std::to_string(i) + " and " + std::to_string(j) + " coincide"),
          first(i), second(j) {}
    std::size_t first;
    std::size_t second;
};

struct NonFiniteLoss : Error {
    explicit NonFiniteLoss(const std::string& what) : Error("NonFiniteLoss", what) {}
};

struct WindowOverflow : Error {
    WindowOverflow(const std::string& what, long graph = -1)
        : Error("WindowOverflow", what), graph_id(graph) {}
    long graph_id;
};

struct ParseError : Error {
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error("ParseError", file + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    std::size_t line_number;
};

struct IndexError : Error {
    explicit IndexError(const std::string& what) : Error("IndexError", what) {}
};

struct MissingNodeLabels : Error {
    explicit MissingNodeLabels(const std::string& what) : Error("MissingNodeLabels", what) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& what) : Error("ShapeMismatch", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("IoError", what) {}
};

struct Divergence : Error {
    Divergence(const std::string& what, int at_epoch) : Error("Divergence", what), epoch(at_epoch) {}
    int epoch;
};

}  // namespace gpgl
