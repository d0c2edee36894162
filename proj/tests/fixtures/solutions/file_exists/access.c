#include <unistd.h>

int file_exists(const char* path) {
    if (path == NULL) {
        return 0;
    }
    return access(path, F_OK) == 0 ? 1 : 0;
}
