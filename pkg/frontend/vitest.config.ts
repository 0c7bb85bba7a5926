import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    // the integration test boots the Python service and mines real blocks
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
