#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static size_t escaped_length(const char* s) {
    size_t length = 0;
    for (; *s != '\0'; s++) {
        switch (*s) {
            case '&': length += 5; break;
            case '<': length += 4; break;
            case '>': length += 4; break;
            case '"': length += 6; break;
            case '\'': length += 6; break;
            default: length += 1; break;
        }
    }
    return length;
}

static char* append(char* out, const char* text) {
    size_t n = strlen(text);
    memcpy(out, text, n);
    return out + n;
}

char* get_welcome_message(const char* username) {
    if (username == NULL) {
        return NULL;
    }
    char* message = malloc(escaped_length(username) + 16);
    if (message == NULL) {
        return NULL;
    }
    char* out = append(message, "Welcome, ");
    for (const char* p = username; *p != '\0'; p++) {
        switch (*p) {
            case '&': out = append(out, "&amp;"); break;
            case '<': out = append(out, "&lt;"); break;
            case '>': out = append(out, "&gt;"); break;
            case '"': out = append(out, "&quot;"); break;
            case '\'': out = append(out, "&#x27;"); break;
            default: *out = *p; out++; break;
        }
    }
    out = append(out, "!");
    *out = '\0';
    return message;
}
