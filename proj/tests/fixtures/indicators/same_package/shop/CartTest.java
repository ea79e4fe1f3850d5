package shop;

import junit.framework.TestCase;

public class CartTest extends TestCase {
    private Cart cart;

    protected void setUp() {
        cart = new Cart();
    }

    public void testAdd() {
        cart.add(3);
        assertEquals(3, cart.total());
    }

    public void testEmpty() {
        assertEquals(0, cart.total());
    }
}
