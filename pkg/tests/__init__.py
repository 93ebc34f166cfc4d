# Test configuration
