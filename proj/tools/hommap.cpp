#include "hommap/cli.hpp"

int main(int argc, char** argv)
{
    return hommap::cli::run(argc, argv);
}
