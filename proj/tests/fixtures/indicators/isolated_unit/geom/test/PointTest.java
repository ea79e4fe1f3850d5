package geom.test;

import geom.Point;
import junit.framework.TestCase;

public class PointTest extends TestCase {
    private Point point;

    protected void setUp() {
        point = new Point(1.0);
    }

    public void testX() {
        assertEquals(1.0, point.x());
    }
}
