#include <exception>
#include <iostream>

#include <nes/cli.hpp>

int main(int argc, char** argv) {
    try {
        return nes::cli::run(argc, argv, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << nes::cli::error_json("internal", e.what());
        return 3;
    } catch (...) {
        std::cerr << nes::cli::error_json("internal", "unknown error");
        return 3;
    }
}
