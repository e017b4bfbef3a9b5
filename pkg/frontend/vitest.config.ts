import { defineConfig } from "vitest/config";

export default defineConfig({
    test: {
        include: ["tests/**/*.test.ts"],
        environment: "node",
        // the acceptance file boots the real service, give it room
        testTimeout: 60_000,
        hookTimeout: 60_000,
    },
});
