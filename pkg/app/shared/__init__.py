# Shared helpers: errors, logging, seeding, file formats
