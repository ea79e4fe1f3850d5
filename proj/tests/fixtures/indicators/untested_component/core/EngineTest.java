package core;

import junit.framework.TestCase;

public class EngineTest extends TestCase {
    private Engine engine;

    protected void setUp() {
        engine = new Engine();
    }

    public void testStart() {
        engine.start();
        assertTrue(engine.isRunning());
    }
}
